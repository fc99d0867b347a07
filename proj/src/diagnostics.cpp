#include "bmo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "bmo/error.hpp"
#include "bmo/metrics.hpp"
#include "bmo/rng.hpp"

namespace bmo {

namespace {

constexpr std::uint64_t kGridSeed = 0x5eed0001;
constexpr std::uint64_t kHoldoutTag = 0x686f6c64; // "hold"
constexpr std::uint64_t kIndexTag = 1;
constexpr std::uint64_t kReplacementTag = 2;

// Tolerances for floating-point checks of exact identities.
constexpr double kPartitionTolerance = 1e-12;
constexpr double kBasisNormSlack = 1e-12;

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double realized_min_lambda(const RunRecord& record) {
  double eta = std::numeric_limits<double>::infinity();
  for (const auto& it : record.iterations) eta = std::min(eta, it.lambda_min);
  return eta;
}

double realized_mu(const RunRecord& record) {
  double mu = 0.0;
  for (const auto& it : record.iterations) mu = std::max(mu, it.max_gradient_norm);
  return mu;
}

} // namespace

std::vector<WeightVector> stability_test_grid(std::size_t M) {
  auto grid = lattice_weights(M, 1000);
  auto uniform = sample_uniform_simplex(M, 1000, kGridSeed);
  grid.insert(grid.end(), uniform.begin(), uniform.end());
  return grid;
}

PerturbationReport perturbation_pair(const ProblemPtr& problem, const SolverConfig& config,
                                     const WeightPerturbation& perturbation) {
  const ParetoMap pareto = pareto_map_of(problem);
  const RunResult base = run_surface_gd(*problem, config);
  const RunResult perturbed = run_surface_gd(*problem, config, RunOptions{perturbation});

  PerturbationReport report;
  report.k = perturbation.iteration;
  report.index = perturbation.index;
  report.samples = config.samples;
  report.seed = config.seed;
  for (const auto& t : stability_test_grid(problem->num_objectives())) {
    const double gap = std::abs(loss(base.model, t, pareto) - loss(perturbed.model, t, pareto));
    report.sup_gap = std::max(report.sup_gap, gap);
  }
  report.frob_gap = (base.model.control_points() - perturbed.model.control_points()).norm();
  report.eta_hat = std::min(realized_min_lambda(base.record), realized_min_lambda(perturbed.record));
  const double basis_size = static_cast<double>(base.model.basis().size());
  report.zeta_hat = std::sqrt(basis_size) / report.eta_hat;
  report.mu_hat = std::max(realized_mu(base.record), realized_mu(perturbed.record));
  const double U = 1.0;
  const double K = static_cast<double>(config.iterations);
  const double k = static_cast<double>(perturbation.iteration);
  const double N = static_cast<double>(config.samples);
  report.bound_value =
      2.0 * report.mu_hat * report.eta_hat * U * (1.0 + (K - k + report.zeta_hat / report.eta_hat) * N);
  report.bound_holds = report.bound_value >= report.frob_gap;
  return report;
}

std::vector<PerturbationReport> perturbation_experiment(const ProblemPtr& problem, const SolverConfig& config,
                                                        std::size_t k, std::size_t repeats, std::size_t threads) {
  if (k < 1 || k > config.iterations) throw ConfigError("perturbed iteration k must lie in [1, K]");
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  pareto_map_of(problem); // fail early
  std::vector<PerturbationReport> reports(repeats);
  parallel_for(repeats, threads, [&](std::size_t r) {
    SolverConfig run = config;
    run.seed = trial_seed(config.seed, r);
    Rng rng(derive_seed(run.seed, {kIndexTag}));
    const std::size_t index = static_cast<std::size_t>(rng.below(config.samples));
    WeightVector replacement = sample_uniform_simplex(problem->num_objectives(), 1, derive_seed(run.seed, {kReplacementTag}))[0];
    reports[r] = perturbation_pair(problem, run, WeightPerturbation{k, index, std::move(replacement)});
    reports[r].repeat = r;
  });
  return reports;
}

GeneralizationGapReport generalization_gap(const BezierSimplex& model, std::span<const WeightVector> training,
                                           const ParetoMap& pareto_map, std::size_t holdout,
                                           std::uint64_t holdout_seed) {
  if (training.empty()) throw DomainError("generalization gap needs a nonempty training sample");
  if (holdout < 1) throw DomainError("holdout size must be at least 1");
  GeneralizationGapReport report;
  report.holdout = holdout;
  report.holdout_seed = holdout_seed;
  report.samples = training.size();
  double train = 0.0;
  for (const auto& t : training) train += loss(model, t, pareto_map);
  report.empirical_error = train / static_cast<double>(training.size());
  double test = 0.0;
  for (const auto& t : sample_uniform_simplex(model.num_objectives(), holdout, holdout_seed))
    test += loss(model, t, pareto_map);
  report.holdout_error = test / static_cast<double>(holdout);
  report.gap = report.empirical_error - report.holdout_error;
  return report;
}

GeneralizationGapReport generalization_gap_experiment(const ProblemPtr& problem, const SolverConfig& config,
                                                      std::size_t holdout) {
  const ParetoMap pareto = pareto_map_of(problem);
  const RunResult run = run_surface_gd(*problem, config);
  auto report = generalization_gap(run.model, run.record.final_weights, pareto, holdout,
                                   derive_seed(config.seed, {kHoldoutTag}));
  report.seed = config.seed;
  report.iterations = config.iterations;
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

LemmaSummary lemma_quantities(const RunRecord& record) {
  LemmaSummary s;
  s.iterations = record.iterations.size();
  if (record.iterations.empty()) return s;
  std::vector<double> lambdas;
  lambdas.reserve(record.iterations.size());
  const double N = static_cast<double>(record.samples);
  for (const auto& it : record.iterations) {
    lambdas.push_back(it.lambda_min);
    s.max_ztg_norm = std::max(s.max_ztg_norm, it.ztg_norm);
    s.max_gradient_norm = std::max(s.max_gradient_norm, it.max_gradient_norm);
    if (!(it.lambda_min > 0.0)) s.lambda_positive = false;
    if (!(it.ztg_norm <= N * 1.0 * it.max_gradient_norm)) {
      s.ztg_bound_holds = false;
      s.ztg_violations.push_back(it.k);
    }
    if (!(it.max_basis_norm <= 1.0 + kBasisNormSlack)) s.basis_norm_bound_holds = false;
    if (!(it.partition_error <= kPartitionTolerance)) s.partition_of_unity_holds = false;
    // Rounding in the computed difference can exceed a zero bound by a few ulps.
    const double step_bound = it.alpha * it.inverse_gram_norm * it.ztg_norm;
    if (!(it.control_delta <= step_bound * (1.0 + 1e-9))) s.step_bound_holds = false;
  }
  s.lambda_min_min = *std::min_element(lambdas.begin(), lambdas.end());
  s.lambda_min_median = median(lambdas);
  return s;
}

nlohmann::json to_json(const PerturbationReport& r) {
  return {{"repeat", r.repeat},     {"k", r.k},           {"index", r.index},
          {"N", r.samples},         {"seed", r.seed},     {"sup_gap", r.sup_gap},
          {"frob_gap", r.frob_gap}, {"eta_hat", r.eta_hat}, {"zeta_hat", r.zeta_hat},
          {"mu_hat", r.mu_hat},     {"bound_value", r.bound_value}, {"bound_holds", r.bound_holds}};
}

nlohmann::json to_json(const GeneralizationGapReport& r) {
  return {{"seed", r.seed},
          {"holdout_seed", r.holdout_seed},
          {"N", r.samples},
          {"K", r.iterations},
          {"holdout", r.holdout},
          {"empirical_error", r.empirical_error},
          {"holdout_error", r.holdout_error},
          {"gap", r.gap}};
}

nlohmann::json to_json(const LemmaSummary& s) {
  return {{"iterations", s.iterations},
          {"lambda_min_min", s.lambda_min_min},
          {"lambda_min_median", s.lambda_min_median},
          {"max_ztg_norm", s.max_ztg_norm},
          {"max_gradient_norm", s.max_gradient_norm},
          {"lambda_positive", s.lambda_positive},
          {"ztg_bound_holds", s.ztg_bound_holds},
          {"basis_norm_bound_holds", s.basis_norm_bound_holds},
          {"partition_of_unity_holds", s.partition_of_unity_holds},
          {"step_bound_holds", s.step_bound_holds},
          {"ztg_violations", s.ztg_violations}};
}

} // namespace bmo
