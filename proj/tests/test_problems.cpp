#include <doctest.h>

#include <cmath>

#include "bmo/error.hpp"
#include "bmo/problems.hpp"
#include "bmo/rng.hpp"
#include "oracles.hpp"

using namespace bmo;

namespace {

oracle::Vec to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector random_point(Rng& rng, std::size_t L) {
  Vector x(static_cast<Eigen::Index>(L));
  for (Eigen::Index l = 0; l < x.size(); ++l) x[l] = 4.0 * rng.uniform() - 2.0;
  return x;
}

// Largest entrywise relative error between the analytic and finite-difference Jacobians.
double jacobian_error(const Problem& p, const Vector& x) {
  const Matrix J = p.jacobian(x);
  const auto ref = oracle::fd_jacobian(
      [&](const oracle::Vec& y) { return to_std(p.evaluate(Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size())))); },
      to_std(x), 1e-6);
  double worst = 0.0;
  for (Eigen::Index m = 0; m < J.rows(); ++m)
    for (Eigen::Index l = 0; l < J.cols(); ++l) {
      const double scale = std::max(1.0, std::abs(ref[m][l]));
      worst = std::max(worst, std::abs(J(m, l) - ref[m][l]) / scale);
    }
  return worst;
}

} // namespace

TEST_CASE("scaled-MED values") {
  const auto p = scaled_med();
  CHECK(p->num_objectives() == 3);
  CHECK(p->dimension() == 3);
  CHECK(p->has_pareto_map());
  const Vector x = Eigen::Vector3d(0, 1, 1);
  const Vector f = p->evaluate(x);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 3.0);
  CHECK(f[2] == 7.0);
  CHECK(p->jacobian(x).row(0).isZero(0.0));
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vector y = random_point(rng, 3);
    const auto ref = oracle::scaled_med_objectives(to_std(y));
    for (int m = 0; m < 3; ++m) CHECK(p->evaluate(y)[m] == doctest::Approx(ref[m]).epsilon(1e-14));
  }
}

TEST_CASE("scaled-MED Pareto map") {
  const auto p = scaled_med();
  CHECK(scaled_med_pareto(WeightVector::vertex(3, 0)) == Vector(Eigen::Vector3d(0, 1, 1)));

  const Vector center = scaled_med_pareto(WeightVector::barycenter(3));
  const auto ref = oracle::scaled_med_descent({1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.05, 1e-10, 1000000);
  for (int l = 0; l < 3; ++l) CHECK(std::abs(center[l] - ref[l]) < 1e-8);
  CHECK(center[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(center[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(center[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  for (const auto& t : sample_uniform_simplex(3, 100, 2)) {
    CHECK(scalarize(*p, t).gradient(p->pareto_map(t)).norm() < 1e-9);
    CHECK(p->pareto_map(t) == scaled_med_pareto(t));
  }
}

TEST_CASE("skew-MED") {
  const auto exps = skew_exponents(3);
  CHECK(exps[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(exps[1] == 1.0);
  CHECK(exps[2] == doctest::Approx(std::exp(1.0)));

  const auto p = make_problem("skew-3med");
  CHECK(p->name() == "skew-3med");
  CHECK_FALSE(p->has_pareto_map());
  const Vector f = p->evaluate(Eigen::Vector3d(1, 0, 0));
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(std::sqrt(2.0)));
  CHECK(f[2] == doctest::Approx(std::pow(std::sqrt(2.0), std::exp(1.0))));
  CHECK_THROWS_AS(skew_med(1), DomainError);
  CHECK_THROWS_AS(p->pareto_map(WeightVector::barycenter(3)), UnsupportedMetricError);
}

TEST_CASE("skew-MMD") {
  const auto p = make_problem("skew-3mmd");
  const Vector f = p->evaluate(Eigen::Vector3d(1, 0, 0));
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t m = 0; m < 3; ++m) {
    Vector c = Vector::Zero(3);
    c[static_cast<Eigen::Index>(m)] = 1.0;
    CHECK(p->jacobian(c).row(static_cast<Eigen::Index>(m)).isZero(0.0));
  }
  auto params = SkewMmdParams::standard(3);
  params.exponents[1] = 0.0;
  CHECK_THROWS_AS(skew_mmd(params), DomainError);
  params = SkewMmdParams::standard(3);
  params.centers[0] = Vector::Zero(2);
  CHECK_THROWS_AS(skew_mmd(params), DomainError);
}

TEST_CASE("registry") {
  for (const auto& name : registered_problems()) CHECK(make_problem(name)->name() == name);
  CHECK(make_problem("skew-med:5")->num_objectives() == 5);
  CHECK(make_problem("skew-mmd:4")->dimension() == 4);
  CHECK_THROWS_AS(make_problem("zdt1"), DomainError);
  CHECK_THROWS_AS(make_problem("skew-med:x"), DomainError);
}

TEST_CASE("Jacobians match central differences") {
  Rng rng(3);
  for (const char* name : {"scaled-med", "skew-3med", "skew-3mmd", "skew-med:4", "skew-mmd:4"}) {
    const auto p = make_problem(name);
    int checked = 0;
    while (checked < 100) {
      const Vector x = random_point(rng, p->dimension());
      bool near_center = false;
      if (p->name() != "scaled-med")
        for (std::size_t m = 0; m < p->num_objectives(); ++m) {
          Vector c = Vector::Zero(x.size());
          c[static_cast<Eigen::Index>(m)] = 1.0;
          near_center = near_center || (x - c).norm() < 0.1;
        }
      if (near_center) continue;
      CHECK_MESSAGE(jacobian_error(*p, x) < 1e-5, name);
      for (std::size_t m = 0; m < p->num_objectives(); ++m) CHECK(p->evaluate(x)[static_cast<Eigen::Index>(m)] >= 0.0);
      ++checked;
    }
  }
}

TEST_CASE("scalarization") {
  const auto p = make_problem("skew-3mmd");
  Rng rng(4);
  const Vector x = random_point(rng, 3);
  CHECK((scalarize(*p, WeightVector::vertex(3, 1)).gradient(x) - p->jacobian(x).row(1).transpose()).norm() == 0.0);

  const WeightVector a{0.2, 0.3, 0.5}, b{0.6, 0.1, 0.3}, mid{0.4, 0.2, 0.4};
  CHECK(scalarize(*p, mid).value(x) ==
        doctest::Approx(0.5 * (scalarize(*p, a).value(x) + scalarize(*p, b).value(x))).epsilon(1e-14));
  CHECK_THROWS_AS(scalarize(*p, WeightVector{0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(p->evaluate(Vector::Zero(2)), DomainError);
}
