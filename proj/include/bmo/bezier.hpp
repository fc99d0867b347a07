#pragma once

#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bmo/simplex.hpp"

namespace bmo {

/// A Bézier simplex b(t|P) = P^T z(t) mapping the (M-1)-simplex into R^L.
/// Rows of the control matrix follow the basis' canonical order.
class BezierSimplex {
public:
  /// Throws DomainError on a row-count mismatch or a non-finite control point.
  BezierSimplex(MultiIndexSet basis, Matrix control_points);

  /// All control points at the origin.
  static BezierSimplex zero(std::size_t M, std::size_t D, std::size_t L);

  const MultiIndexSet& basis() const noexcept { return basis_; }
  std::size_t num_objectives() const noexcept { return basis_.num_objectives(); }
  std::size_t degree() const noexcept { return basis_.degree(); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(P_.cols()); }
  const Matrix& control_points() const noexcept { return P_; }

  Vector evaluate(const WeightVector& t) const;

  /// Rows of Z * P, i.e. the model evaluated at every row of a design matrix.
  Matrix evaluate_design(const Matrix& Z) const;

private:
  MultiIndexSet basis_;
  Matrix P_;
};

/// Stacks bernstein_vector(ts[n]) as rows. Throws DomainError on empty input.
Matrix design_matrix(std::span<const WeightVector> ts, const MultiIndexSet& basis);

/// Least-squares solver for Z P = X built around a column-pivoted Householder QR of Z.
///
/// Construction also takes the singular values of Z and rejects the design when
/// sigma_min < kSingularRatio * sigma_max. The singular values feed the
/// stability diagnostics (lambda_min(Z^T Z) = sigma_min^2).
class DesignSolver {
public:
  static constexpr double kSingularRatio = 1e-10;

  /// Throws SingularFitError on a rank-deficient design or when N < |basis|.
  explicit DesignSolver(Matrix Z);

  const Matrix& design() const noexcept { return Z_; }
  const Vector& singular_values() const noexcept { return sigma_; }
  double sigma_min() const { return sigma_[sigma_.size() - 1]; }
  double sigma_max() const { return sigma_[0]; }

  /// Smallest eigenvalue of Z^T Z.
  double gram_lambda_min() const { return sigma_min() * sigma_min(); }

  /// ||(Z^T Z)^{-1}||_F = sqrt(sum sigma_i^-4).
  double inverse_gram_frobenius() const;

  /// argmin_P ||rhs - Z P||_F.
  Matrix solve(const Matrix& rhs) const;

private:
  Matrix Z_;
  Vector sigma_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
};

/// Fits the control points minimizing (1/N) ||X - Z P||_F^2, X having one row per sample.
BezierSimplex fit_least_squares(std::span<const WeightVector> ts, const Matrix& xs, const MultiIndexSet& basis);

/// Model document: {"M","D","L","index_order","control_points"}. `meta`, when
/// non-null, is stored under an extra "meta" key that readers ignore.
nlohmann::json model_to_json(const BezierSimplex& bs, const nlohmann::json* meta = nullptr);
BezierSimplex model_from_json(const nlohmann::json& doc);

std::string serialize_model(const BezierSimplex& bs, const nlohmann::json* meta = nullptr);
/// Throws SchemaError on malformed documents or an index order that is not canonical.
BezierSimplex deserialize_model(std::string_view text);

} // namespace bmo
