#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bmo/bezier.hpp"
#include "bmo/problems.hpp"

namespace bmo {

/// Step sizes alpha^(k) in (0, 1], k = 1, 2, ...
class StepSchedule {
public:
  /// alpha^(k) = 1/k.
  static StepSchedule harmonic() { return StepSchedule(Kind::Harmonic, 1.0); }
  /// Throws ConfigError unless 0 < alpha <= 1.
  static StepSchedule constant(double alpha);
  /// "harmonic" or "constant:<alpha>".
  static StepSchedule parse(std::string_view text);

  double alpha(std::size_t k) const;
  std::string describe() const;

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;

private:
  enum class Kind { Harmonic, Constant };
  StepSchedule(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

/// One single-objective update x -> x' for the scalarized objective at outer iteration k.
/// Must be a pure function of its arguments.
using StepRule = std::function<Vector(const Vector& x, const ScalarizedObjective& objective, std::size_t k)>;

/// x' = x - alpha^(k) J_f(x)^T t.
StepRule gradient_step_rule(StepSchedule schedule);

struct SolverConfig {
  std::size_t samples = 30;      ///< N, weights drawn per iteration
  std::size_t iterations = 1000; ///< K
  std::size_t degree = 3;        ///< D
  StepSchedule schedule = StepSchedule::harmonic();
  std::uint64_t seed = 0;
  std::optional<Matrix> initial_control_points; ///< nullopt means P^(1) = 0
  std::size_t resample_retries = 5;
  bool record_weights = false;

  /// Throws ConfigError, e.g. when N < |N^M_D|.
  void validate(const Problem& problem) const;
};

/// Quantities measured at one outer iteration.
struct IterationTrace {
  std::size_t k = 0;
  double alpha = 0.0;
  std::size_t attempts = 1;         ///< 1 + number of singular resamples
  double lambda_min = 0.0;          ///< smallest eigenvalue of Z^T Z
  double inverse_gram_norm = 0.0;   ///< ||(Z^T Z)^{-1}||_F
  double ztg_norm = 0.0;            ///< ||Z^T G||_F
  double control_delta = 0.0;       ///< ||P^(k+1) - P^(k)||_F
  double max_gradient_norm = 0.0;   ///< max_n ||J_f(b(t_n))^T t_n||_2
  double max_basis_norm = 0.0;      ///< max_n ||z(t_n)||_2
  double partition_error = 0.0;     ///< max_n |sum_i z_i(t_n) - 1|
  std::vector<WeightVector> weights; ///< only when SolverConfig::record_weights
};

struct RunRecord {
  std::vector<IterationTrace> iterations;
  std::vector<WeightVector> final_weights; ///< the sample used at iteration K
  std::size_t samples = 0; ///< N
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

struct RunResult {
  BezierSimplex model;
  RunRecord record;
};

/// Replace weight `index` of iteration `iteration` (1-based) with `replacement`.
struct WeightPerturbation {
  std::size_t iteration;
  std::size_t index;
  WeightVector replacement;
};

struct RunOptions {
  std::optional<WeightPerturbation> perturbation;
};

/// The weight sample drawn at (iteration, attempt); seeded by derive_seed(seed, {k, attempt}).
std::vector<WeightVector> iteration_weights(std::size_t M, std::size_t N, std::uint64_t seed, std::size_t k,
                                            std::size_t attempt);

/// Generic loop: sample weights, evaluate the model, step every point with `rule`,
/// refit all control points by least squares; K times.
/// Throws ConfigError on invalid config and SolverAbort when resampling is exhausted.
RunResult run_generic(const Problem& problem, const StepRule& rule, const SolverConfig& config,
                      const RunOptions& options = {});

/// Surface-wise gradient descent, updating control points in closed form:
/// P <- P - alpha^(k) (Z^T Z)^{-1} Z^T G. Same weight stream as run_generic.
RunResult run_surface_gd(const Problem& problem, const SolverConfig& config, const RunOptions& options = {});

/// {"iterations": [...], "footer": {...}}; the footer embeds the final model document.
nlohmann::json trace_to_json(const RunResult& result);

} // namespace bmo
