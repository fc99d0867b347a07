#include "bmo/bmo.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "bmo/bezier.hpp"
#include "bmo/diagnostics.hpp"
#include "bmo/error.hpp"
#include "bmo/metrics.hpp"
#include "bmo/problems.hpp"
#include "bmo/rng.hpp"
#include "bmo/solver.hpp"

struct bmo_problem {
  bmo::ProblemPtr impl;
};

struct bmo_model {
  bmo::BezierSimplex impl;
};

struct bmo_run {
  bmo::RunResult impl;
};

namespace {

thread_local std::string last_error;

bmo_status fail(bmo_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps the core's exception hierarchy onto status codes.
template <class F>
bmo_status guarded(F&& body) {
  try {
    body();
    return BMO_OK;
  } catch (const bmo::ConfigError& e) {
    return fail(BMO_ERR_CONFIG, e.what());
  } catch (const bmo::DomainError& e) {
    return fail(BMO_ERR_DOMAIN, e.what());
  } catch (const bmo::SchemaError& e) {
    return fail(BMO_ERR_SCHEMA, e.what());
  } catch (const bmo::UnsupportedMetricError& e) {
    return fail(BMO_ERR_UNSUPPORTED, e.what());
  } catch (const bmo::SingularFitError& e) {
    return fail(BMO_ERR_SINGULAR, e.what());
  } catch (const bmo::SolverAbort& e) {
    return fail(BMO_ERR_SOLVER_ABORT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(BMO_ERR_SCHEMA, e.what());
  } catch (const std::exception& e) {
    return fail(BMO_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(BMO_ERR_RUNTIME, "unknown error");
  }
}

#define BMO_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(BMO_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bmo::Vector to_vector(const double* p, std::size_t n) { return Eigen::Map<const bmo::Vector>(p, static_cast<Eigen::Index>(n)); }

bmo::Matrix to_matrix(const double* p, std::size_t rows, std::size_t cols) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void write_matrix(const bmo::Matrix& m, double* out) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

std::vector<bmo::WeightVector> to_weights(const double* p, std::size_t count, std::size_t M) {
  std::vector<bmo::WeightVector> ts;
  ts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ts.emplace_back(std::span<const double>(p + i * M, M));
  return ts;
}

bmo::SolverConfig to_config(const bmo_solver_config& c) {
  bmo::SolverConfig config;
  config.samples = c.samples;
  config.iterations = c.iterations;
  config.degree = c.degree;
  config.schedule = c.schedule ? bmo::StepSchedule::parse(c.schedule) : bmo::StepSchedule::harmonic();
  config.seed = c.seed;
  config.resample_retries = c.resample_retries;
  config.record_weights = c.record_weights != 0;
  if (c.initial) config.initial_control_points = c.initial->impl.control_points();
  return config;
}

} // namespace

extern "C" {

const char* bmo_version(void) { return BMO_VERSION_STRING; }

const char* bmo_status_name(bmo_status status) {
  switch (status) {
  case BMO_OK: return "ok";
  case BMO_ERR_INVALID_ARGUMENT: return "invalid_argument";
  case BMO_ERR_DOMAIN: return "domain_error";
  case BMO_ERR_CONFIG: return "config_error";
  case BMO_ERR_SCHEMA: return "schema_error";
  case BMO_ERR_UNSUPPORTED: return "unsupported_metric";
  case BMO_ERR_SINGULAR: return "singular_fit";
  case BMO_ERR_SOLVER_ABORT: return "solver_abort";
  case BMO_ERR_RUNTIME: return "runtime_error";
  }
  return "unknown";
}

const char* bmo_last_error(void) { return last_error.c_str(); }

void bmo_string_free(char* s) { std::free(s); }

void bmo_buffer_free(double* p) { std::free(p); }

uint64_t bmo_trial_seed(uint64_t root, uint64_t index) { return bmo::trial_seed(root, index); }

bmo_status bmo_sample_simplex(size_t M, size_t n, uint64_t seed, double* out) {
  BMO_REQUIRE(out, "output buffer is null");
  return guarded([&] {
    const auto ts = bmo::sample_uniform_simplex(M, n, seed);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < M; ++m) out[i * M + m] = ts[i][m];
  });
}

bmo_status bmo_lattice_weights(size_t M, size_t count, double* out) {
  BMO_REQUIRE(out, "output buffer is null");
  return guarded([&] {
    const auto ts = bmo::lattice_weights(M, count);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t m = 0; m < M; ++m) out[i * M + m] = ts[i][m];
  });
}

bmo_status bmo_control_point_count(size_t M, size_t D, size_t* out) {
  BMO_REQUIRE(out, "output pointer is null");
  return guarded([&] {
    if (M == 0 || D == 0) throw bmo::DomainError("M and D must be at least 1");
    *out = bmo::multi_index_count(M, D);
  });
}

bmo_status bmo_problem_create(const char* name, bmo_problem** out) {
  BMO_REQUIRE(name && out, "null argument");
  return guarded([&] { *out = new bmo_problem{bmo::make_problem(name)}; });
}

void bmo_problem_destroy(bmo_problem* problem) { delete problem; }

const char* bmo_problem_name(const bmo_problem* problem) { return problem ? problem->impl->name().c_str() : ""; }

size_t bmo_problem_num_objectives(const bmo_problem* problem) { return problem ? problem->impl->num_objectives() : 0; }

size_t bmo_problem_dimension(const bmo_problem* problem) { return problem ? problem->impl->dimension() : 0; }

int bmo_problem_has_pareto_map(const bmo_problem* problem) { return problem && problem->impl->has_pareto_map(); }

bmo_status bmo_problem_evaluate(const bmo_problem* problem, const double* x, size_t L, double* f, size_t M) {
  BMO_REQUIRE(problem && x && f, "null argument");
  BMO_REQUIRE(L == problem->impl->dimension() && M == problem->impl->num_objectives(), "buffer size mismatch");
  return guarded([&] {
    const bmo::Vector v = problem->impl->evaluate(to_vector(x, L));
    std::copy(v.data(), v.data() + v.size(), f);
  });
}

bmo_status bmo_problem_jacobian(const bmo_problem* problem, const double* x, size_t L, double* jac, size_t M) {
  BMO_REQUIRE(problem && x && jac, "null argument");
  BMO_REQUIRE(L == problem->impl->dimension() && M == problem->impl->num_objectives(), "buffer size mismatch");
  return guarded([&] { write_matrix(problem->impl->jacobian(to_vector(x, L)), jac); });
}

bmo_status bmo_problem_pareto_map(const bmo_problem* problem, const double* t, size_t M, double* x, size_t L) {
  BMO_REQUIRE(problem && t && x, "null argument");
  BMO_REQUIRE(L == problem->impl->dimension() && M == problem->impl->num_objectives(), "buffer size mismatch");
  return guarded([&] {
    const bmo::Vector v = problem->impl->pareto_map(bmo::WeightVector(std::span<const double>(t, M)));
    std::copy(v.data(), v.data() + v.size(), x);
  });
}

bmo_status bmo_model_zero(size_t M, size_t D, size_t L, bmo_model** out) {
  BMO_REQUIRE(out, "null argument");
  return guarded([&] { *out = new bmo_model{bmo::BezierSimplex::zero(M, D, L)}; });
}

bmo_status bmo_model_create(size_t M, size_t D, size_t L, const double* control_points, bmo_model** out) {
  BMO_REQUIRE(control_points && out, "null argument");
  return guarded([&] {
    auto basis = bmo::MultiIndexSet::enumerate(M, D);
    bmo::Matrix P = to_matrix(control_points, basis.size(), L);
    *out = new bmo_model{bmo::BezierSimplex(std::move(basis), std::move(P))};
  });
}

bmo_status bmo_model_from_json(const char* json, bmo_model** out) {
  BMO_REQUIRE(json && out, "null argument");
  return guarded([&] { *out = new bmo_model{bmo::deserialize_model(json)}; });
}

bmo_status bmo_model_to_json(const bmo_model* model, const char* meta_json, char** out) {
  BMO_REQUIRE(model && out, "null argument");
  return guarded([&] {
    if (meta_json) {
      const auto meta = nlohmann::json::parse(meta_json);
      *out = duplicate(bmo::serialize_model(model->impl, &meta));
    } else {
      *out = duplicate(bmo::serialize_model(model->impl));
    }
  });
}

void bmo_model_destroy(bmo_model* model) { delete model; }

size_t bmo_model_num_objectives(const bmo_model* model) { return model ? model->impl.num_objectives() : 0; }
size_t bmo_model_degree(const bmo_model* model) { return model ? model->impl.degree() : 0; }
size_t bmo_model_dimension(const bmo_model* model) { return model ? model->impl.dimension() : 0; }
size_t bmo_model_num_control_points(const bmo_model* model) { return model ? model->impl.basis().size() : 0; }

bmo_status bmo_model_control_points(const bmo_model* model, double* out, size_t len) {
  BMO_REQUIRE(model && out, "null argument");
  BMO_REQUIRE(len == model->impl.basis().size() * model->impl.dimension(), "buffer size mismatch");
  write_matrix(model->impl.control_points(), out);
  return BMO_OK;
}

bmo_status bmo_model_evaluate(const bmo_model* model, const double* t, size_t M, double* x, size_t L) {
  BMO_REQUIRE(model && t && x, "null argument");
  BMO_REQUIRE(L == model->impl.dimension(), "output buffer size mismatch");
  return guarded([&] {
    const bmo::Vector v = model->impl.evaluate(bmo::WeightVector(std::span<const double>(t, M)));
    std::copy(v.data(), v.data() + v.size(), x);
  });
}

bmo_status bmo_model_fit(size_t M, size_t D, size_t L, size_t N, const double* ts, const double* xs, bmo_model** out) {
  BMO_REQUIRE(ts && xs && out, "null argument");
  return guarded([&] {
    const auto weights = to_weights(ts, N, M);
    const auto basis = bmo::MultiIndexSet::enumerate(M, D);
    *out = new bmo_model{bmo::fit_least_squares(weights, to_matrix(xs, N, L), basis)};
  });
}

void bmo_solver_config_init(bmo_solver_config* config) {
  if (!config) return;
  config->samples = 30;
  config->iterations = 1000;
  config->degree = 3;
  config->schedule = nullptr;
  config->seed = 0;
  config->resample_retries = 5;
  config->record_weights = 0;
  config->algorithm = BMO_SURFACE_GD;
  config->initial = nullptr;
}

bmo_status bmo_solver_config_check(const bmo_problem* problem, const bmo_solver_config* config) {
  BMO_REQUIRE(problem && config, "null argument");
  return guarded([&] {
    to_config(*config).validate(*problem->impl);
    if (config->algorithm != BMO_SURFACE_GD && config->algorithm != BMO_GENERIC_GD)
      throw bmo::ConfigError("unknown algorithm");
  });
}

bmo_status bmo_solve(const bmo_problem* problem, const bmo_solver_config* config, bmo_run** out) {
  BMO_REQUIRE(problem && config && out, "null argument");
  return guarded([&] {
    const bmo::SolverConfig c = to_config(*config);
    if (config->algorithm == BMO_GENERIC_GD) {
      *out = new bmo_run{bmo::run_generic(*problem->impl, bmo::gradient_step_rule(c.schedule), c)};
    } else {
      *out = new bmo_run{bmo::run_surface_gd(*problem->impl, c)};
    }
  });
}

void bmo_run_destroy(bmo_run* run) { delete run; }

bmo_status bmo_run_model(const bmo_run* run, bmo_model** out) {
  BMO_REQUIRE(run && out, "null argument");
  return guarded([&] { *out = new bmo_model{run->impl.model}; });
}

bmo_status bmo_run_trace_json(const bmo_run* run, char** out) {
  BMO_REQUIRE(run && out, "null argument");
  return guarded([&] { *out = duplicate(bmo::trace_to_json(run->impl).dump(2) + "\n"); });
}

bmo_status bmo_run_lemma_json(const bmo_run* run, char** out) {
  BMO_REQUIRE(run && out, "null argument");
  return guarded([&] { *out = duplicate(bmo::to_json(bmo::lemma_quantities(run->impl.record)).dump()); });
}

double bmo_run_wall_seconds(const bmo_run* run) { return run ? run->impl.record.wall_seconds : 0.0; }

bmo_status bmo_loss(const bmo_model* model, const bmo_problem* problem, const double* t, size_t M, double* out) {
  BMO_REQUIRE(model && problem && t && out, "null argument");
  return guarded([&] {
    *out = bmo::loss(model->impl, bmo::WeightVector(std::span<const double>(t, M)), bmo::pareto_map_of(problem->impl));
  });
}

bmo_status bmo_mse(const bmo_model* model, const bmo_problem* problem, size_t n, uint64_t seed, double* out) {
  BMO_REQUIRE(model && problem && out, "null argument");
  return guarded([&] { *out = bmo::mse(model->impl, bmo::pareto_map_of(problem->impl), n, seed); });
}

bmo_status bmo_gd(const double* X, size_t nx, const double* Y, size_t ny, size_t dim, double* out) {
  BMO_REQUIRE(X && Y && out, "null argument");
  return guarded([&] {
    *out = bmo::generational_distance(bmo::PointSet(to_matrix(X, nx, dim), "X"), bmo::PointSet(to_matrix(Y, ny, dim), "Y"));
  });
}

bmo_status bmo_igd(const double* X, size_t nx, const double* Y, size_t ny, size_t dim, double* out) {
  BMO_REQUIRE(X && Y && out, "null argument");
  return guarded([&] {
    *out = bmo::inverted_generational_distance(bmo::PointSet(to_matrix(X, nx, dim), "X"),
                                               bmo::PointSet(to_matrix(Y, ny, dim), "Y"));
  });
}

bmo_status bmo_model_sample(const bmo_model* model, size_t n, uint64_t seed, double* weights_out, double* points_out) {
  BMO_REQUIRE(model, "null argument");
  return guarded([&] {
    const auto ts = bmo::sample_uniform_simplex(model->impl.num_objectives(), n, seed);
    const std::size_t M = model->impl.num_objectives();
    if (weights_out)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t m = 0; m < M; ++m) weights_out[i * M + m] = ts[i][m];
    if (points_out) write_matrix(model->impl.evaluate_design(bmo::design_matrix(ts, model->impl.basis())), points_out);
  });
}

void bmo_sweep_options_init(bmo_sweep_options* options) {
  if (!options) return;
  const bmo::SweepOptions d;
  options->tolerance = d.tolerance;
  options->max_steps = d.max_steps;
  options->initial_step = d.initial_step;
  options->decay = d.decay;
  options->threads = d.threads;
}

bmo_status bmo_scalarization_sweep(const bmo_problem* problem, const double* weights, size_t count,
                                   const bmo_sweep_options* options, double* points_out, int* converged_out) {
  BMO_REQUIRE(problem && weights && points_out, "null argument");
  return guarded([&] {
    bmo::SweepOptions o;
    if (options) o = {options->tolerance, options->max_steps, options->initial_step, options->decay, options->threads};
    const auto ts = to_weights(weights, count, problem->impl->num_objectives());
    const auto result = bmo::scalarization_sweep(*problem->impl, ts, o);
    write_matrix(result.points, points_out);
    if (converged_out)
      for (std::size_t i = 0; i < count; ++i) converged_out[i] = result.converged[i] ? 1 : 0;
  });
}

bmo_status bmo_perturbation_experiment(const bmo_problem* problem, const bmo_solver_config* config, size_t k,
                                       size_t repeats, size_t threads, char** out_json) {
  BMO_REQUIRE(problem && config && out_json, "null argument");
  return guarded([&] {
    const auto reports = bmo::perturbation_experiment(problem->impl, to_config(*config), k, repeats, threads);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(bmo::to_json(r));
    *out_json = duplicate(arr.dump());
  });
}

bmo_status bmo_generalization_gap(const bmo_problem* problem, const bmo_solver_config* config, size_t holdout,
                                  char** out_json) {
  BMO_REQUIRE(problem && config && out_json, "null argument");
  return guarded([&] {
    *out_json = duplicate(bmo::to_json(bmo::generalization_gap_experiment(problem->impl, to_config(*config), holdout)).dump());
  });
}

} // extern "C"
