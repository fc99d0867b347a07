#include "bmo/bezier.hpp"

#include <cmath>
#include <string>

#include "bmo/error.hpp"

namespace bmo {

using nlohmann::json;

BezierSimplex::BezierSimplex(MultiIndexSet basis, Matrix control_points)
    : basis_(std::move(basis)), P_(std::move(control_points)) {
  if (static_cast<std::size_t>(P_.rows()) != basis_.size())
    throw DomainError("control matrix has " + std::to_string(P_.rows()) + " rows, degree-" +
                      std::to_string(basis_.degree()) + " basis in " + std::to_string(basis_.num_objectives()) +
                      " variables needs " + std::to_string(basis_.size()));
  if (P_.cols() < 1) throw DomainError("control points must have dimension L >= 1");
  if (!P_.allFinite()) throw DomainError("control points must be finite");
}

BezierSimplex BezierSimplex::zero(std::size_t M, std::size_t D, std::size_t L) {
  auto basis = MultiIndexSet::enumerate(M, D);
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(L));
  return BezierSimplex(std::move(basis), std::move(P));
}

Vector BezierSimplex::evaluate(const WeightVector& t) const {
  return P_.transpose() * bernstein_vector(t, basis_);
}

Matrix BezierSimplex::evaluate_design(const Matrix& Z) const {
  if (Z.cols() != P_.rows()) throw DomainError("design matrix width does not match the control matrix");
  return Z * P_;
}

Matrix design_matrix(std::span<const WeightVector> ts, const MultiIndexSet& basis) {
  if (ts.empty()) throw DomainError("design matrix needs at least one weight");
  Matrix Z(static_cast<Eigen::Index>(ts.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t n = 0; n < ts.size(); ++n) Z.row(static_cast<Eigen::Index>(n)) = bernstein_vector(ts[n], basis).transpose();
  return Z;
}

DesignSolver::DesignSolver(Matrix Z) : Z_(std::move(Z)) {
  Eigen::JacobiSVD<Matrix> svd(Z_);
  sigma_ = svd.singularValues();
  // With fewer samples than control points the rank is at most N and the
  // trailing singular values are exactly zero.
  if (Z_.rows() < Z_.cols()) throw SingularFitError(0.0, sigma_.size() ? sigma_[0] : 0.0);
  if (!(sigma_min() >= kSingularRatio * sigma_max()) || sigma_max() == 0.0)
    throw SingularFitError(sigma_min(), sigma_max());
  qr_.compute(Z_);
}

double DesignSolver::inverse_gram_frobenius() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    const double s2 = sigma_[i] * sigma_[i];
    acc += 1.0 / (s2 * s2);
  }
  return std::sqrt(acc);
}

Matrix DesignSolver::solve(const Matrix& rhs) const {
  if (rhs.rows() != Z_.rows()) throw DomainError("right-hand side row count does not match the design");
  return qr_.solve(rhs);
}

BezierSimplex fit_least_squares(std::span<const WeightVector> ts, const Matrix& xs, const MultiIndexSet& basis) {
  if (static_cast<std::size_t>(xs.rows()) != ts.size())
    throw DomainError("fit needs one target row per weight (" + std::to_string(ts.size()) + " weights, " +
                      std::to_string(xs.rows()) + " targets)");
  DesignSolver solver(design_matrix(ts, basis));
  return BezierSimplex(basis, solver.solve(xs));
}

json model_to_json(const BezierSimplex& bs, const json* meta) {
  json doc;
  doc["M"] = bs.num_objectives();
  doc["D"] = bs.degree();
  doc["L"] = bs.dimension();
  doc["index_order"] = bs.basis().indices();
  json rows = json::array();
  const Matrix& P = bs.control_points();
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < P.cols(); ++j) row.push_back(P(i, j));
    rows.push_back(std::move(row));
  }
  doc["control_points"] = std::move(rows);
  if (meta) doc["meta"] = *meta;
  return doc;
}

namespace {

std::size_t positive_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw SchemaError(std::string("model document is missing \"") + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw SchemaError(std::string("model field \"") + key + "\" must be a positive integer");
  return v.get<std::size_t>();
}

} // namespace

BezierSimplex model_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("model document must be a JSON object");
  const std::size_t M = positive_field(doc, "M");
  const std::size_t D = positive_field(doc, "D");
  const std::size_t L = positive_field(doc, "L");
  auto basis = MultiIndexSet::enumerate(M, D);

  if (!doc.contains("index_order") || !doc.at("index_order").is_array())
    throw SchemaError("model document is missing the \"index_order\" array");
  const json& order = doc.at("index_order");
  if (order.size() != basis.size())
    throw SchemaError("index_order has " + std::to_string(order.size()) + " entries, expected " +
                      std::to_string(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    MultiIndex d;
    try {
      d = order[i].get<MultiIndex>();
    } catch (const json::exception&) {
      throw SchemaError("index_order entry " + std::to_string(i) + " is not an integer array");
    }
    if (d != basis.indices()[i]) throw SchemaError("index_order entry " + std::to_string(i) + " is not canonical");
  }

  if (!doc.contains("control_points") || !doc.at("control_points").is_array())
    throw SchemaError("model document is missing the \"control_points\" array");
  const json& rows = doc.at("control_points");
  if (rows.size() != basis.size())
    throw SchemaError("control_points has " + std::to_string(rows.size()) + " rows, expected " +
                      std::to_string(basis.size()) + " for M=" + std::to_string(M) + ", D=" + std::to_string(D));
  Matrix P(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(L));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != L)
      throw SchemaError("control point row " + std::to_string(i) + " must hold " + std::to_string(L) + " numbers");
    for (std::size_t j = 0; j < L; ++j) {
      if (!row[j].is_number()) throw SchemaError("control point entries must be numbers");
      const double v = row[j].get<double>();
      if (!std::isfinite(v)) throw SchemaError("control point entries must be finite");
      P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return BezierSimplex(std::move(basis), std::move(P));
}

std::string serialize_model(const BezierSimplex& bs, const json* meta) { return model_to_json(bs, meta).dump(2) + "\n"; }

BezierSimplex deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model document is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

} // namespace bmo
