#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmo/bezier.hpp"
#include "bmo/problems.hpp"

namespace bmo {

/// ||b(t|P) - x*(t)||_2.
double loss(const BezierSimplex& bs, const WeightVector& t, const ParetoMap& pareto_map);

/// Mean of the squared loss over n uniform simplex samples drawn with `seed`.
double mse(const BezierSimplex& bs, const ParetoMap& pareto_map, std::size_t n, std::uint64_t seed);

/// A finite set of points in R^L, one per row.
class PointSet {
public:
  /// Throws DomainError if empty or zero-dimensional.
  PointSet(Matrix points, std::string label = {});

  /// The model evaluated at n uniform weights drawn with `seed`.
  static PointSet from_model(const BezierSimplex& bs, std::size_t n, std::uint64_t seed, std::string label = "model");

  const Matrix& points() const noexcept { return points_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(points_.cols()); }

private:
  Matrix points_;
  std::string label_;
};

/// GD(X, Y): mean over x in X of the distance to the nearest y in Y.
double generational_distance(const PointSet& X, const PointSet& Y);

/// IGD(X, Y): mean over y in Y of the distance to the nearest x in X.
double inverted_generational_distance(const PointSet& X, const PointSet& Y);

/// Gradient descent on each scalarized objective from the origin with
/// diminishing steps initial_step / (1 + j / decay), stopping at
/// ||gradient|| < tolerance or after max_steps.
struct SweepOptions {
  double tolerance = 1e-8;
  std::size_t max_steps = 100000;
  double initial_step = 0.1;
  double decay = 100.0;
  std::size_t threads = 1;
};

struct SweepResult {
  std::vector<WeightVector> weights;
  Matrix points; ///< one minimizer per weight
  std::vector<bool> converged;
  std::vector<std::size_t> steps;

  std::size_t converged_count() const;
};

/// Result rows do not depend on `options.threads`.
SweepResult scalarization_sweep(const Problem& problem, std::span<const WeightVector> weights,
                                const SweepOptions& options = {});

/// Reference set for GD/IGD: the sweep over `count` lattice weights. Every
/// point is kept, converged or not; the sweep result is returned for reporting.
PointSet validation_set(const Problem& problem, std::size_t count = 1000, const SweepOptions& options = {},
                        SweepResult* sweep = nullptr);

} // namespace bmo
