#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bmo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point on the probability simplex: nonnegative entries summing to one.
///
/// Construction renormalizes when the sum is off by at most 1e-9 and rejects
/// anything further away, so accumulated rounding is tolerated but genuine
/// bugs (unnormalized weights) are not.
class WeightVector {
public:
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kRenormalizeTolerance = 1e-9;

  explicit WeightVector(Vector entries);
  explicit WeightVector(std::initializer_list<double> entries);
  explicit WeightVector(std::span<const double> entries);

  /// The m-th vertex e_m of the (M-1)-simplex, 0-based.
  static WeightVector vertex(std::size_t M, std::size_t m);

  /// The barycenter (1/M, ..., 1/M).
  static WeightVector barycenter(std::size_t M);

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.size()); }
  double operator[](std::size_t i) const { return entries_[static_cast<Eigen::Index>(i)]; }
  const Vector& values() const noexcept { return entries_; }

  friend bool operator==(const WeightVector& a, const WeightVector& b) { return a.entries_ == b.entries_; }

private:
  Vector entries_;
};

/// Exponent vector of a monomial; entries sum to the owning set's degree.
using MultiIndex = std::vector<unsigned>;

/// The ordered set of degree-D multi-indices in M variables with their multinomial
/// coefficients. Ordering is reverse-lexicographic: (D,0,...,0) first, (0,...,0,D) last.
/// Control matrices are always laid out in this order.
class MultiIndexSet {
public:
  /// Throws DomainError when M == 0 or D == 0.
  static MultiIndexSet enumerate(std::size_t M, std::size_t D);

  std::size_t num_objectives() const noexcept { return M_; }
  std::size_t degree() const noexcept { return D_; }
  std::size_t size() const noexcept { return indices_.size(); }

  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  /// True when every coefficient was computed in exact integer arithmetic.
  bool exact_coefficients() const noexcept { return exact_; }

  /// Position of `d` in the canonical order, if it belongs to the set.
  std::optional<std::size_t> position(const MultiIndex& d) const;

  /// Position of D * e_m, the control point that the m-th vertex selects.
  std::size_t vertex_position(std::size_t m) const;

  friend bool operator==(const MultiIndexSet& a, const MultiIndexSet& b) { return a.M_ == b.M_ && a.D_ == b.D_; }

private:
  MultiIndexSet(std::size_t M, std::size_t D);

  std::size_t M_;
  std::size_t D_;
  std::vector<MultiIndex> indices_;
  std::vector<double> coefficients_;
  bool exact_ = true;
};

/// Number of multi-indices, binomial(D + M - 1, M - 1).
std::size_t multi_index_count(std::size_t M, std::size_t D);

/// Free-function spelling of MultiIndexSet::enumerate.
inline MultiIndexSet enumerate_multi_indices(std::size_t M, std::size_t D) { return MultiIndexSet::enumerate(M, D); }

/// z(t): entry i is binom(D, d_i) t^{d_i}. Entries are in [0, 1] and sum to one.
Vector bernstein_vector(const WeightVector& t, const MultiIndexSet& basis);

/// n i.i.d. draws from the flat Dirichlet on the (M-1)-simplex (normalized unit
/// exponentials). A pure function of (M, n, seed).
std::vector<WeightVector> sample_uniform_simplex(std::size_t M, std::size_t n, std::uint64_t seed);

/// Deterministic lattice weights: the points of the smallest triangular lattice
/// {d / H : d in N^M_H} with at least `count` points, thinned to exactly `count`
/// by taking canonical positions floor(i * size / count). When the lattice size
/// equals `count` (e.g. M=3, count=10, H=3) the full lattice is returned.
std::vector<WeightVector> lattice_weights(std::size_t M, std::size_t count);

} // namespace bmo
