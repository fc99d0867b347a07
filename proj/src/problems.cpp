#include "bmo/problems.hpp"

#include <cmath>
#include <string>

#include "bmo/error.hpp"

namespace bmo {

Vector Problem::pareto_map(const WeightVector&) const {
  throw UnsupportedMetricError("problem '" + name_ + "' has no analytical Pareto map");
}

void Problem::check_point(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != L_)
    throw DomainError("problem '" + name_ + "' expects " + std::to_string(L_) + " variables, got " +
                      std::to_string(x.size()));
}

ParetoMap pareto_map_of(const ProblemPtr& problem) {
  if (!problem->has_pareto_map())
    throw UnsupportedMetricError("problem '" + problem->name() + "' has no analytical Pareto map");
  return [problem](const WeightVector& t) { return problem->pareto_map(t); };
}

ScalarizedObjective::ScalarizedObjective(const Problem& problem, WeightVector t) : problem_(&problem), t_(std::move(t)) {
  if (t_.size() != problem.num_objectives())
    throw DomainError("weight has " + std::to_string(t_.size()) + " entries, problem has " +
                      std::to_string(problem.num_objectives()) + " objectives");
}

double ScalarizedObjective::value(const Vector& x) const { return t_.values().dot(problem_->evaluate(x)); }

Vector ScalarizedObjective::gradient(const Vector& x) const { return problem_->jacobian(x).transpose() * t_.values(); }

namespace {

// f_m(x) = sum_l W(m,l) (x_l - C(m,l))^2
class ScaledMed final : public Problem {
public:
  ScaledMed() : Problem("scaled-med", 3, 3) {
    W_ << 1, 3, 2,
          2, 1, 3,
          3, 2, 1;
    C_ << 0, 1, 1,
          1, 0, 1,
          1, 1, -1;
  }

  Vector evaluate(const Vector& x) const override {
    check_point(x);
    Vector f(3);
    for (int m = 0; m < 3; ++m) f[m] = (W_.row(m).array() * (x.transpose() - C_.row(m)).array().square()).sum();
    return f;
  }

  Matrix jacobian(const Vector& x) const override {
    check_point(x);
    Matrix J(3, 3);
    for (int m = 0; m < 3; ++m) J.row(m) = 2.0 * W_.row(m).array() * (x.transpose() - C_.row(m)).array();
    return J;
  }

  bool has_pareto_map() const override { return true; }
  Vector pareto_map(const WeightVector& t) const override { return scaled_med_pareto(t); }

private:
  Eigen::Matrix3d W_;
  Eigen::Matrix3d C_;
};

class SkewMed final : public Problem {
public:
  SkewMed(std::size_t M, std::string name) : Problem(std::move(name), M, M), p_(skew_exponents(M)) {}

  Vector evaluate(const Vector& x) const override {
    check_point(x);
    Vector f(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m) f[m] = std::pow(scaled_sq_dist(x, m), p_[static_cast<std::size_t>(m)]);
    return f;
  }

  Matrix jacobian(const Vector& x) const override {
    check_point(x);
    const Eigen::Index M = x.size();
    Matrix J = Matrix::Zero(M, M);
    for (Eigen::Index m = 0; m < M; ++m) {
      const double s = scaled_sq_dist(x, m);
      if (s == 0.0) continue; // exact center: zero (sub)gradient
      const double p = p_[static_cast<std::size_t>(m)];
      Vector d = x;
      d[m] -= 1.0;
      // ds/dx = sqrt(2) (x - e_m)
      J.row(m) = (p * std::pow(s, p - 1.0) * std::sqrt(2.0)) * d.transpose();
    }
    return J;
  }

private:
  static double scaled_sq_dist(const Vector& x, Eigen::Index m) {
    Vector d = x;
    d[m] -= 1.0;
    return d.squaredNorm() / std::sqrt(2.0);
  }

  std::vector<double> p_;
};

class SkewMmd final : public Problem {
public:
  SkewMmd(SkewMmdParams params, std::string name, std::size_t L)
      : Problem(std::move(name), params.exponents.size(), L), params_(std::move(params)) {}

  Vector evaluate(const Vector& x) const override {
    check_point(x);
    const std::size_t M = num_objectives();
    Vector f(static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < M; ++m)
      f[static_cast<Eigen::Index>(m)] = std::pow(scaled(x, m).norm(), params_.exponents[m]);
    return f;
  }

  Matrix jacobian(const Vector& x) const override {
    check_point(x);
    const std::size_t M = num_objectives();
    Matrix J = Matrix::Zero(static_cast<Eigen::Index>(M), x.size());
    for (std::size_t m = 0; m < M; ++m) {
      const Vector u = scaled(x, m);
      const double r = u.norm();
      if (r == 0.0) continue; // exact center: zero (sub)gradient
      const double p = params_.exponents[m];
      // grad ||u||^p = p ||u||^{p-2} A^T u, u = A (x - c)
      J.row(static_cast<Eigen::Index>(m)) =
          (p * std::pow(r, p - 2.0)) * params_.scales[m].cwiseProduct(u).transpose();
    }
    return J;
  }

private:
  Vector scaled(const Vector& x, std::size_t m) const {
    return params_.scales[m].cwiseProduct(x - params_.centers[m]);
  }

  SkewMmdParams params_;
};

std::size_t parse_count(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used);
  } catch (const std::exception&) {
    throw DomainError("bad objective count in problem name '" + name + "'");
  }
  if (used != text.size()) throw DomainError("bad objective count in problem name '" + name + "'");
  return v;
}

} // namespace

ProblemPtr scaled_med() { return std::make_shared<ScaledMed>(); }

Vector scaled_med_pareto(const WeightVector& t) {
  if (t.size() != 3) throw DomainError("scaled-MED weights have 3 entries");
  const double t1 = t[0], t2 = t[1], t3 = t[2];
  Vector x(3);
  x << (2 * t2 + 3 * t3) / (t1 + 2 * t2 + 3 * t3),
       (3 * t1 + 2 * t3) / (3 * t1 + t2 + 2 * t3),
       (2 * t1 + 3 * t2 - t3) / (2 * t1 + 3 * t2 + t3);
  return x;
}

std::vector<double> skew_exponents(std::size_t M) {
  if (M < 2) throw DomainError("skew problems need M >= 2 objectives");
  std::vector<double> p(M);
  for (std::size_t m = 0; m < M; ++m) p[m] = std::exp(2.0 * static_cast<double>(m) / static_cast<double>(M - 1) - 1.0);
  return p;
}

ProblemPtr skew_med(std::size_t M, std::string name) {
  if (M < 2) throw DomainError("skew-MED needs M >= 2 objectives");
  if (name.empty()) name = "skew-med:" + std::to_string(M);
  return std::make_shared<SkewMed>(M, std::move(name));
}

SkewMmdParams SkewMmdParams::standard(std::size_t M) {
  SkewMmdParams params;
  params.exponents = skew_exponents(M);
  for (std::size_t m = 0; m < M; ++m) {
    Vector a = Vector::Constant(static_cast<Eigen::Index>(M), 0.8);
    a[static_cast<Eigen::Index>(m)] = 0.6;
    params.scales.push_back(a);
    params.centers.push_back(Vector::Unit(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(m)));
  }
  return params;
}

ProblemPtr skew_mmd(const SkewMmdParams& params, std::string name) {
  const std::size_t M = params.exponents.size();
  if (M == 0) throw DomainError("skew-MMD needs at least one objective");
  if (params.scales.size() != M || params.centers.size() != M)
    throw DomainError("skew-MMD needs one scale vector and one center per objective");
  const auto L = params.centers.front().size();
  if (L == 0) throw DomainError("skew-MMD centers must be nonempty");
  for (std::size_t m = 0; m < M; ++m) {
    if (params.centers[m].size() != L || params.scales[m].size() != L)
      throw DomainError("skew-MMD scale and center dimensions disagree");
    if (!(params.exponents[m] > 0.0) || !std::isfinite(params.exponents[m]))
      throw DomainError("skew-MMD exponents must be positive");
    if (!params.scales[m].allFinite() || !params.centers[m].allFinite())
      throw DomainError("skew-MMD parameters must be finite");
  }
  return std::make_shared<SkewMmd>(params, std::move(name), static_cast<std::size_t>(L));
}

ProblemPtr make_problem(const std::string& name) {
  if (name == "scaled-med") return scaled_med();
  if (name == "skew-3med") return skew_med(3, name);
  if (name == "skew-3mmd") return skew_mmd(SkewMmdParams::standard(3), "skew-3mmd");
  if (name.rfind("skew-med:", 0) == 0) return skew_med(parse_count(name, name.substr(9)), name);
  if (name.rfind("skew-mmd:", 0) == 0) {
    const std::size_t M = parse_count(name, name.substr(9));
    if (M < 2) throw DomainError("skew-MMD needs M >= 2 objectives");
    return skew_mmd(SkewMmdParams::standard(M), name);
  }
  throw DomainError("unknown problem '" + name + "' (known: scaled-med, skew-3med, skew-3mmd, skew-med:M, skew-mmd:M)");
}

std::vector<std::string> registered_problems() { return {"scaled-med", "skew-3med", "skew-3mmd"}; }

} // namespace bmo
