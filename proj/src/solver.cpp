#include "bmo/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "bmo/error.hpp"
#include "bmo/rng.hpp"

namespace bmo {

StepSchedule StepSchedule::constant(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("constant step size must lie in (0, 1], got " + std::to_string(alpha));
  return StepSchedule(Kind::Constant, alpha);
}

StepSchedule StepSchedule::parse(std::string_view text) {
  if (text == "harmonic" || text == "1/k") return harmonic();
  constexpr std::string_view prefix = "constant:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string value(text.substr(prefix.size()));
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ConfigError("bad step size in schedule '" + std::string(text) + "'");
    return constant(alpha);
  }
  throw ConfigError("unknown step schedule '" + std::string(text) + "' (use harmonic or constant:<alpha>)");
}

double StepSchedule::alpha(std::size_t k) const {
  if (k == 0) throw DomainError("iterations are numbered from 1");
  return kind_ == Kind::Harmonic ? 1.0 / static_cast<double>(k) : value_;
}

std::string StepSchedule::describe() const {
  if (kind_ == Kind::Harmonic) return "harmonic";
  char buf[64];
  std::snprintf(buf, sizeof buf, "constant:%.17g", value_);
  return buf;
}

StepRule gradient_step_rule(StepSchedule schedule) {
  return [schedule](const Vector& x, const ScalarizedObjective& objective, std::size_t k) -> Vector {
    return x - schedule.alpha(k) * objective.gradient(x);
  };
}

void SolverConfig::validate(const Problem& problem) const {
  if (degree < 1) throw ConfigError("degree D must be at least 1");
  if (iterations < 1) throw ConfigError("iteration count K must be at least 1");
  const std::size_t M = problem.num_objectives();
  const std::size_t needed = multi_index_count(M, degree);
  if (samples < needed)
    throw ConfigError("samples per iteration N=" + std::to_string(samples) + " is too small: a degree-" +
                      std::to_string(degree) + " Bezier simplex with M=" + std::to_string(M) +
                      " objectives requires N >= " + std::to_string(needed));
  if (initial_control_points) {
    const Matrix& P = *initial_control_points;
    if (static_cast<std::size_t>(P.rows()) != needed || static_cast<std::size_t>(P.cols()) != problem.dimension())
      throw ConfigError("initial control matrix must be " + std::to_string(needed) + " x " +
                        std::to_string(problem.dimension()));
    if (!P.allFinite()) throw ConfigError("initial control points must be finite");
  }
}

std::vector<WeightVector> iteration_weights(std::size_t M, std::size_t N, std::uint64_t seed, std::size_t k,
                                            std::size_t attempt) {
  return sample_uniform_simplex(M, N, derive_seed(seed, {k, attempt}));
}

namespace {

enum class Update { StepAndRefit, ClosedForm };

RunResult run_loop(const Problem& problem, const StepRule* rule, const SolverConfig& config, const RunOptions& options,
                   Update update) {
  config.validate(problem);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t M = problem.num_objectives();
  const std::size_t L = problem.dimension();
  const std::size_t N = config.samples;
  const auto basis = MultiIndexSet::enumerate(M, config.degree);

  if (options.perturbation) {
    const auto& pert = *options.perturbation;
    if (pert.iteration < 1 || pert.iteration > config.iterations) throw ConfigError("perturbed iteration out of range");
    if (pert.index >= N) throw ConfigError("perturbed weight index out of range");
    if (pert.replacement.size() != M) throw ConfigError("replacement weight has the wrong dimension");
  }

  Matrix P = config.initial_control_points
                 ? *config.initial_control_points
                 : Matrix::Zero(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(L));

  RunRecord record;
  record.seed = config.seed;
  record.samples = N;
  record.iterations.reserve(config.iterations);

  for (std::size_t k = 1; k <= config.iterations; ++k) {
    IterationTrace trace;
    trace.k = k;
    trace.alpha = config.schedule.alpha(k);

    std::vector<WeightVector> ts;
    std::optional<DesignSolver> solver;
    double last_sigma = 0.0;
    for (std::size_t attempt = 0; attempt <= config.resample_retries && !solver; ++attempt) {
      ts = iteration_weights(M, N, config.seed, k, attempt);
      if (options.perturbation && options.perturbation->iteration == k)
        ts[options.perturbation->index] = options.perturbation->replacement;
      try {
        solver.emplace(design_matrix(ts, basis));
        trace.attempts = attempt + 1;
      } catch (const SingularFitError& e) {
        last_sigma = e.sigma_min();
      }
    }
    if (!solver) throw SolverAbort(k, config.resample_retries + 1, last_sigma);

    const Matrix& Z = solver->design();
    const Matrix B = Z * P; // current surface points, one per row
    Matrix G(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(L));
    for (std::size_t n = 0; n < N; ++n) {
      const auto row = static_cast<Eigen::Index>(n);
      const Vector b = B.row(row).transpose();
      const Vector g = problem.jacobian(b).transpose() * ts[n].values();
      G.row(row) = g.transpose();
      trace.max_gradient_norm = std::max(trace.max_gradient_norm, g.norm());
      trace.max_basis_norm = std::max(trace.max_basis_norm, Z.row(row).norm());
      trace.partition_error = std::max(trace.partition_error, std::abs(Z.row(row).sum() - 1.0));
    }

    Matrix next;
    if (update == Update::ClosedForm) {
      next = P - trace.alpha * solver->solve(G);
    } else {
      Matrix X(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(L));
      for (std::size_t n = 0; n < N; ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        const Vector x = (*rule)(B.row(row).transpose(), ScalarizedObjective(problem, ts[n]), k);
        if (static_cast<std::size_t>(x.size()) != L) throw DomainError("step rule changed the point dimension");
        X.row(row) = x.transpose();
      }
      next = solver->solve(X);
    }

    trace.lambda_min = solver->gram_lambda_min();
    trace.inverse_gram_norm = solver->inverse_gram_frobenius();
    trace.ztg_norm = (Z.transpose() * G).norm();
    trace.control_delta = (next - P).norm();
    P = std::move(next);
    if (!P.allFinite()) throw std::runtime_error("control points diverged at iteration " + std::to_string(k));

    if (k == config.iterations) record.final_weights = ts;
    if (config.record_weights) trace.weights = std::move(ts);
    record.iterations.push_back(std::move(trace));
  }

  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return RunResult{BezierSimplex(basis, std::move(P)), std::move(record)};
}

nlohmann::json weights_json(const std::vector<WeightVector>& ts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : ts) out.push_back(std::vector<double>(t.values().begin(), t.values().end()));
  return out;
}

} // namespace

RunResult run_generic(const Problem& problem, const StepRule& rule, const SolverConfig& config,
                      const RunOptions& options) {
  return run_loop(problem, &rule, config, options, Update::StepAndRefit);
}

RunResult run_surface_gd(const Problem& problem, const SolverConfig& config, const RunOptions& options) {
  return run_loop(problem, nullptr, config, options, Update::ClosedForm);
}

nlohmann::json trace_to_json(const RunResult& result) {
  using nlohmann::json;
  json iterations = json::array();
  for (const auto& it : result.record.iterations) {
    json row = {{"k", it.k},
                {"alpha", it.alpha},
                {"attempts", it.attempts},
                {"lambda_min", it.lambda_min},
                {"inverse_gram_norm", it.inverse_gram_norm},
                {"ztg_norm", it.ztg_norm},
                {"control_delta", it.control_delta},
                {"max_gradient_norm", it.max_gradient_norm},
                {"max_basis_norm", it.max_basis_norm},
                {"partition_error", it.partition_error}};
    if (!it.weights.empty()) row["weights"] = weights_json(it.weights);
    iterations.push_back(std::move(row));
  }
  json footer = {{"seed", result.record.seed},
                 {"samples", result.record.samples},
                 {"iterations", result.record.iterations.size()},
                 {"wall_seconds", result.record.wall_seconds},
                 {"final_weights", weights_json(result.record.final_weights)},
                 {"model", model_to_json(result.model)}};
  return {{"iterations", std::move(iterations)}, {"footer", std::move(footer)}};
}

} // namespace bmo
