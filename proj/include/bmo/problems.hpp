#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bmo/simplex.hpp"

namespace bmo {

/// An M-objective differentiable problem over R^L.
class Problem {
public:
  virtual ~Problem() = default;

  const std::string& name() const noexcept { return name_; }
  std::size_t num_objectives() const noexcept { return M_; }
  std::size_t dimension() const noexcept { return L_; }

  /// f(x) in R^M.
  virtual Vector evaluate(const Vector& x) const = 0;

  /// J_f(x) in R^{M x L}; row m is the gradient of f_m.
  virtual Matrix jacobian(const Vector& x) const = 0;

  virtual bool has_pareto_map() const { return false; }

  /// x*(t), the minimizer of the t-weighted scalarization. Throws
  /// UnsupportedMetricError unless has_pareto_map().
  virtual Vector pareto_map(const WeightVector& t) const;

protected:
  Problem(std::string name, std::size_t M, std::size_t L) : name_(std::move(name)), M_(M), L_(L) {}

  void check_point(const Vector& x) const;

private:
  std::string name_;
  std::size_t M_;
  std::size_t L_;
};

using ProblemPtr = std::shared_ptr<const Problem>;
using ParetoMap = std::function<Vector(const WeightVector&)>;

/// The problem's analytical map as a ParetoMap; throws UnsupportedMetricError if it has none.
ParetoMap pareto_map_of(const ProblemPtr& problem);

/// sum_m t_m f_m and its gradient J_f^T t.
class ScalarizedObjective {
public:
  ScalarizedObjective(const Problem& problem, WeightVector t);

  const Problem& problem() const noexcept { return *problem_; }
  const WeightVector& weight() const noexcept { return t_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

private:
  const Problem* problem_;
  WeightVector t_;
};

inline ScalarizedObjective scalarize(const Problem& problem, const WeightVector& t) { return {problem, t}; }

/// Three-variable three-objective separable quadratic with a closed-form Pareto map.
ProblemPtr scaled_med();

/// Closed-form minimizer of the t-weighted scaled-MED objective.
Vector scaled_med_pareto(const WeightVector& t);

/// p_m = exp(2(m-1)/(M-1) - 1), m = 1..M. Requires M >= 2.
std::vector<double> skew_exponents(std::size_t M);

/// f_m(x) = ((1/sqrt 2) ||x - e_m||^2)^{p_m} over R^M. Requires M >= 2.
ProblemPtr skew_med(std::size_t M, std::string name = {});

/// Parameters of f_m(x) = ||A_m (x - c_m)||^{p_m} with diagonal A_m.
struct SkewMmdParams {
  std::vector<Vector> scales;  ///< diagonal of A_m, length L each
  std::vector<Vector> centers; ///< c_m, length L each
  std::vector<double> exponents;

  /// A_m = diag with 3/5 in slot m and 4/5 elsewhere, c_m = e_m, p_m = skew_exponents(M).
  /// For M = 3 this is the "skew-3mmd" instance.
  static SkewMmdParams standard(std::size_t M);
};

/// Throws DomainError on inconsistent dimensions or a nonpositive exponent.
ProblemPtr skew_mmd(const SkewMmdParams& params, std::string name = "skew-mmd");

/// Registry lookup: scaled-med, skew-3med, skew-3mmd, skew-med:M, skew-mmd:M.
/// Throws DomainError for unknown names.
ProblemPtr make_problem(const std::string& name);

/// Names make_problem accepts without a parameter.
std::vector<std::string> registered_problems();

} // namespace bmo
