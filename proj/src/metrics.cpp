#include "bmo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "bmo/error.hpp"

namespace bmo {

double loss(const BezierSimplex& bs, const WeightVector& t, const ParetoMap& pareto_map) {
  if (!pareto_map) throw UnsupportedMetricError("loss needs an analytical Pareto map");
  const Vector target = pareto_map(t);
  if (static_cast<std::size_t>(target.size()) != bs.dimension())
    throw DomainError("Pareto map dimension does not match the model");
  return (bs.evaluate(t) - target).norm();
}

double mse(const BezierSimplex& bs, const ParetoMap& pareto_map, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("mse needs at least one sample");
  const auto ts = sample_uniform_simplex(bs.num_objectives(), n, seed);
  double acc = 0.0;
  for (const auto& t : ts) {
    const double l = loss(bs, t, pareto_map);
    acc += l * l;
  }
  return acc / static_cast<double>(n);
}

PointSet::PointSet(Matrix points, std::string label) : points_(std::move(points)), label_(std::move(label)) {
  if (points_.rows() == 0) throw DomainError("point set '" + label_ + "' is empty");
  if (points_.cols() == 0) throw DomainError("point set '" + label_ + "' has zero dimension");
}

PointSet PointSet::from_model(const BezierSimplex& bs, std::size_t n, std::uint64_t seed, std::string label) {
  const auto ts = sample_uniform_simplex(bs.num_objectives(), n, seed);
  return PointSet(bs.evaluate_design(design_matrix(ts, bs.basis())), std::move(label));
}

double generational_distance(const PointSet& X, const PointSet& Y) {
  if (X.dimension() != Y.dimension())
    throw DomainError("point sets '" + X.label() + "' and '" + Y.label() + "' differ in dimension");
  const Matrix& A = X.points();
  const Matrix& B = Y.points();
  const Eigen::Index L = A.cols();
  // Plain loops in a fixed summation order, so results are reproducible bit for bit.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      double d2 = 0.0;
      for (Eigen::Index l = 0; l < L; ++l) {
        const double diff = A(i, l) - B(j, l);
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
    acc += std::sqrt(best);
  }
  return acc / static_cast<double>(A.rows());
}

double inverted_generational_distance(const PointSet& X, const PointSet& Y) { return generational_distance(Y, X); }

std::size_t SweepResult::converged_count() const {
  return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), true));
}

SweepResult scalarization_sweep(const Problem& problem, std::span<const WeightVector> weights,
                                const SweepOptions& options) {
  if (weights.empty()) throw DomainError("sweep needs at least one weight");
  if (!(options.initial_step > 0.0) || !(options.decay > 0.0)) throw DomainError("sweep step parameters must be positive");
  const std::size_t count = weights.size();
  SweepResult result;
  result.weights.assign(weights.begin(), weights.end());
  result.points.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(problem.dimension()));
  result.converged.assign(count, false);
  result.steps.assign(count, 0);
  // vector<bool> is not safe for concurrent writes to neighbouring slots.
  std::vector<char> converged(count, 0);

  auto minimize = [&](std::size_t i) {
    const ScalarizedObjective objective(problem, weights[i]);
    Vector x = Vector::Zero(static_cast<Eigen::Index>(problem.dimension()));
    std::size_t j = 0;
    for (; j < options.max_steps; ++j) {
      const Vector g = objective.gradient(x);
      if (g.norm() < options.tolerance) {
        converged[i] = 1;
        break;
      }
      x -= options.initial_step / (1.0 + static_cast<double>(j) / options.decay) * g;
    }
    result.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
    result.steps[i] = j;
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) minimize(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += threads) minimize(i);
      });
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < count; ++i) result.converged[i] = converged[i] != 0;
  return result;
}

PointSet validation_set(const Problem& problem, std::size_t count, const SweepOptions& options, SweepResult* sweep) {
  const auto weights = lattice_weights(problem.num_objectives(), count);
  SweepResult result = scalarization_sweep(problem, weights, options);
  PointSet set(result.points, problem.name() + "-sweep");
  if (sweep) *sweep = std::move(result);
  return set;
}

} // namespace bmo
