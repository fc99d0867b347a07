#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "bmo/solver.hpp"

namespace bmo {

/// Version tag of stability_test_grid; bump when its construction changes.
inline constexpr int kStabilityGridVersion = 1;

/// 2000 fixed weights: the 1000-point lattice followed by 1000 uniform draws from a
/// fixed seed. Used to approximate the supremum over t of a loss gap.
std::vector<WeightVector> stability_test_grid(std::size_t M);

/// Outcome of one pair of runs whose weight streams differ in a single weight.
///
/// eta_hat, zeta_hat and mu_hat are realized proxies of the constants in the
/// perturbation bound: eta_hat is the smallest lambda_min(Z^T Z) seen in either
/// run, zeta_hat = sqrt(|N^M_D|) / eta_hat, mu_hat the largest scalarized
/// gradient norm. bound_value = 2 mu eta U (1 + (K - k + zeta/eta) N) with U = 1.
/// bound_holds is reported, not enforced.
struct PerturbationReport {
  std::size_t repeat = 0;
  std::size_t k = 0;
  std::size_t index = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double sup_gap = 0.0;
  double frob_gap = 0.0;
  double eta_hat = 0.0;
  double zeta_hat = 0.0;
  double mu_hat = 0.0;
  double bound_value = 0.0;
  bool bound_holds = false;
};

/// Runs surface-wise gradient descent with `config` twice, the second time with
/// `perturbation` applied, and compares the final models on the stability grid.
/// Needs a problem with an analytical Pareto map.
PerturbationReport perturbation_pair(const ProblemPtr& problem, const SolverConfig& config,
                                     const WeightPerturbation& perturbation);

/// `repeats` independent pairs. Repeat r uses seed trial_seed(config.seed, r), a
/// uniformly chosen index and a fresh replacement weight. Output is ordered by repeat
/// and independent of `threads`.
std::vector<PerturbationReport> perturbation_experiment(const ProblemPtr& problem, const SolverConfig& config,
                                                        std::size_t k, std::size_t repeats, std::size_t threads = 1);

struct GeneralizationGapReport {
  std::uint64_t seed = 0;
  std::uint64_t holdout_seed = 0;
  std::size_t samples = 0;
  std::size_t iterations = 0;
  std::size_t holdout = 0;
  double empirical_error = 0.0; ///< mean loss over the last training sample
  double holdout_error = 0.0;   ///< mean loss over fresh uniform weights
  double gap = 0.0;             ///< empirical - holdout
};

/// Trains with run_surface_gd and compares training and held-out loss.
GeneralizationGapReport generalization_gap_experiment(const ProblemPtr& problem, const SolverConfig& config,
                                                      std::size_t holdout);

/// The gap of an already trained model, given its training weights.
GeneralizationGapReport generalization_gap(const BezierSimplex& model, std::span<const WeightVector> training,
                                           const ParetoMap& pareto_map, std::size_t holdout,
                                           std::uint64_t holdout_seed);

/// Summary of the per-iteration quantities in a run record.
struct LemmaSummary {
  std::size_t iterations = 0;
  double lambda_min_min = 0.0;
  double lambda_min_median = 0.0;
  double max_ztg_norm = 0.0;
  double max_gradient_norm = 0.0;
  bool lambda_positive = true;      ///< lambda_min > 0 everywhere
  bool ztg_bound_holds = true;      ///< ||Z^T G||_F <= N * 1 * mu_hat(k) at every k
  bool basis_norm_bound_holds = true; ///< ||z(t)||_2 <= 1 for every sampled t
  bool partition_of_unity_holds = true; ///< |sum z(t) - 1| <= 1e-12 for every sampled t
  bool step_bound_holds = true;     ///< ||dP||_F <= alpha ||(Z^T Z)^-1||_F ||Z^T G||_F
  std::vector<std::size_t> ztg_violations; ///< iterations where the Z^T G bound fails
};

LemmaSummary lemma_quantities(const RunRecord& record);

double median(std::vector<double> values);

nlohmann::json to_json(const PerturbationReport& r);
nlohmann::json to_json(const GeneralizationGapReport& r);
nlohmann::json to_json(const LemmaSummary& s);

} // namespace bmo
