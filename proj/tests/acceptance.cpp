// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bmo/bezier.hpp"
#include "bmo/diagnostics.hpp"
#include "bmo/metrics.hpp"
#include "bmo/problems.hpp"
#include "bmo/rng.hpp"
#include "bmo/solver.hpp"
#include "harness.hpp"
#include "oracles.hpp"

namespace {

constexpr std::uint64_t kRootSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

oracle::Vec to_std(const bmo::Vector& v) { return {v.data(), v.data() + v.size()}; }

harness::ExperimentConfig experiment_config(const std::string& problem, std::vector<std::string> metrics) {
  harness::ExperimentConfig c;
  c.problem = problem;
  c.samples = {30, 50, 100};
  c.iterations = 1000;
  c.degree = 3;
  c.trials = 20;
  c.root_seed = kRootSeed;
  c.metrics = std::move(metrics);
  return c;
}

double setting_mean(const harness::ExperimentReport& r, std::size_t i, const std::string& metric) {
  return r.settings[i].metrics.at(metric).mean;
}

Outcome scaled_med_mse() {
  const auto r = harness::run_experiment(experiment_config("scaled-med", {"mse"}));
  Outcome o;
  o.pass = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const double m = setting_mean(r, i, "mse");
    o.pass = o.pass && r.settings[i].failed == 0 && m >= 1e-5 && m <= 4e-4;
    o.detail += fmt("N=%zu mean %.3e sd %.2e; ", r.settings[i].samples, m, r.settings[i].metrics.at("mse").sd);
  }
  o.pass = o.pass && setting_mean(r, 2, "mse") < setting_mean(r, 0, "mse");
  o.detail += "band [1e-5, 4e-4], N=100 < N=30";
  return o;
}

Outcome skew_distances() {
  Outcome o;
  o.pass = true;
  for (const char* p : {"skew-3med", "skew-3mmd"}) {
    const auto r = harness::run_experiment(experiment_config(p, {"gd", "igd"}));
    o.detail += std::string(p) + fmt(" (Y converged %d/1000):", r.validation.at("converged").get<int>());
    for (std::size_t i = 0; i < 3; ++i) {
      const double gd = setting_mean(r, i, "gd"), igd = setting_mean(r, i, "igd");
      o.pass = o.pass && r.settings[i].failed == 0 && gd < 0.15 && igd < 0.15;
      o.detail += fmt(" N=%zu GD %.3e IGD %.3e;", r.settings[i].samples, gd, igd);
    }
    o.detail += " ";
  }
  o.detail += "threshold 0.15, validation set from the scalarization sweep";
  return o;
}

Outcome equivalence() {
  const auto p = bmo::scaled_med();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    bmo::SolverConfig c;
    c.samples = 30;
    c.iterations = 10;
    c.seed = bmo::trial_seed(kRootSeed, seed);
    const auto a = bmo::run_surface_gd(*p, c);
    const auto b = bmo::run_generic(*p, bmo::gradient_step_rule(c.schedule), c);
    worst = std::max(worst, (a.model.control_points() - b.model.control_points()).norm());
  }
  return {worst < 1e-8, fmt("max ||dP||_F = %.3e over 5 seeds (limit 1e-8)", worst)};
}

Outcome planted_recovery() {
  const auto basis = bmo::MultiIndexSet::enumerate(3, 3);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    bmo::Rng rng(bmo::derive_seed(kRootSeed, {4, i}));
    bmo::Matrix P0(10, 3);
    for (Eigen::Index k = 0; k < P0.size(); ++k) P0.data()[k] = 2.0 * rng.uniform() - 1.0;
    const bmo::BezierSimplex planted(basis, P0);
    const auto ts = bmo::sample_uniform_simplex(3, 20, bmo::derive_seed(kRootSeed, {5, i}));
    const auto fit = bmo::fit_least_squares(ts, planted.evaluate_design(bmo::design_matrix(ts, basis)), basis);
    worst = std::max(worst, (fit.control_points() - P0).norm());
  }
  return {worst < 1e-8, fmt("max ||P - P0||_F = %.3e over 20 planted models (limit 1e-8)", worst)};
}

Outcome stationarity() {
  const auto p = bmo::scaled_med();
  double worst = 0.0;
  for (const auto& t : bmo::sample_uniform_simplex(3, 1000, kRootSeed)) {
    const bmo::Vector g = p->jacobian(bmo::scaled_med_pareto(t)).transpose() * t.values();
    worst = std::max(worst, g.norm());
  }
  const bmo::Vector center = bmo::scaled_med_pareto(bmo::WeightVector::barycenter(3));
  const auto ref = oracle::scaled_med_descent({1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.05, 1e-10, 1000000);
  double dev = 0.0;
  for (int l = 0; l < 3; ++l) dev = std::max(dev, std::abs(center[l] - ref[l]));
  return {worst < 1e-9 && dev < 1e-8,
          fmt("max stationarity residual %.3e (limit 1e-9); x*(1/3,1/3,1/3) = (%.10f, %.10f, %.10f), "
              "oracle deviation %.3e (limit 1e-8)",
              worst, center[0], center[1], center[2], dev)};
}

Outcome jacobians() {
  using Objectives = std::function<oracle::Vec(const oracle::Vec&)>;
  const std::vector<std::pair<std::string, Objectives>> cases{
      {"scaled-med", oracle::scaled_med_objectives},
      {"skew-3med", oracle::skew_med_objectives},
      {"skew-3mmd", oracle::skew_mmd3_objectives}};
  Outcome o;
  o.pass = true;
  bmo::Rng rng(bmo::derive_seed(kRootSeed, {6}));
  for (const auto& [name, reference] : cases) {
    const auto p = bmo::make_problem(name);
    double worst = 0.0, worst_value = 0.0;
    int points = 0;
    while (points < 100) {
      oracle::Vec x(3);
      for (double& v : x) v = 4.0 * rng.uniform() - 2.0;
      if (name != "scaled-med") {
        bool near = false;
        for (int m = 0; m < 3; ++m) {
          oracle::Vec c(3, 0.0);
          c[m] = 1.0;
          near = near || oracle::distance(x, c) <= 0.1;
        }
        if (near) continue;
      }
      ++points;
      const bmo::Vector xv = Eigen::Map<const bmo::Vector>(x.data(), 3);
      const bmo::Matrix J = p->jacobian(xv);
      const auto fd = oracle::fd_jacobian(reference, x, 1e-6);
      const auto f_ref = reference(x);
      const bmo::Vector f = p->evaluate(xv);
      for (int m = 0; m < 3; ++m) {
        double num = 0.0, den = 0.0;
        for (int l = 0; l < 3; ++l) {
          num += std::pow(J(m, l) - fd[m][l], 2);
          den += fd[m][l] * fd[m][l];
        }
        worst = std::max(worst, std::sqrt(num / den));
        worst_value = std::max(worst_value, std::abs(f[m] - f_ref[m]) / std::max(1.0, std::abs(f_ref[m])));
      }
    }
    o.pass = o.pass && worst < 1e-5 && worst_value < 1e-12;
    o.detail += fmt("%s max rel. error %.2e (objectives %.1e); ", name.c_str(), worst, worst_value);
  }
  o.detail += "100 points each, h=1e-6, limit 1e-5";
  return o;
}

Outcome gradient_bound() {
  const auto p = bmo::scaled_med();
  const auto basis = bmo::MultiIndexSet::enumerate(3, 3);
  std::size_t iterations = 0, weights = 0, violations = 0;
  double worst_ratio = 0.0, worst_partition = 0.0, worst_norm = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    bmo::SolverConfig c;
    c.samples = 30;
    c.iterations = 100;
    c.seed = bmo::trial_seed(kRootSeed, seed);
    c.record_weights = true;
    const auto r = bmo::run_surface_gd(*p, c);
    for (const auto& it : r.record.iterations) {
      ++iterations;
      const double bound = static_cast<double>(c.samples) * 1.0 * it.max_gradient_norm;
      if (!(it.ztg_norm <= bound)) ++violations;
      worst_ratio = std::max(worst_ratio, it.ztg_norm / bound);
      for (const auto& t : it.weights) {
        ++weights;
        const auto z = oracle::bernstein(to_std(t.values()), 3);
        double sum = 0.0, sq = 0.0;
        for (double v : z) {
          sum += v;
          sq += v * v;
        }
        worst_partition = std::max(worst_partition, std::abs(sum - 1.0));
        worst_norm = std::max(worst_norm, std::sqrt(sq));
        const bmo::Vector zl = bmo::bernstein_vector(t, basis);
        worst_partition = std::max(worst_partition, std::abs(zl.sum() - 1.0));
        worst_norm = std::max(worst_norm, zl.norm());
      }
    }
  }
  const bool pass = violations == 0 && iterations == 500 && worst_partition < 1e-12 && worst_norm <= 1.0;
  return {pass, fmt("%zu iterations, %zu violations of ||Z^T G||_F <= N mu (max ratio %.3f); %zu weights, "
                    "max |sum z - 1| %.1e, max ||z||_2 %.6f",
                    iterations, violations, worst_ratio, weights, worst_partition, worst_norm)};
}

Outcome stability() {
  harness::ExperimentConfig c;
  c.problem = "scaled-med";
  c.samples = {30, 100};
  c.iterations = 50;
  c.perturb_k = 25;
  c.repeats = 10;
  c.root_seed = kRootSeed;
  c.mode = "perturb";
  const auto perturb = harness::run_diagnostics(c).report.at("settings");
  const double sup30 = perturb[0].at("median_sup_gap"), sup100 = perturb[1].at("median_sup_gap");

  c.samples = {30, 50, 100};
  c.iterations = 1000;
  c.trials = 20;
  c.holdout = 10000;
  c.mode = "gengap";
  const auto gap = harness::run_diagnostics(c).report.at("settings");
  const double g30 = gap[0].at("mean_abs_gap"), g50 = gap[1].at("mean_abs_gap"), g100 = gap[2].at("mean_abs_gap");
  const bool pass = sup100 < sup30 && g50 <= g30 && g100 <= g50;
  return {pass, fmt("median sup_gap N=30 %.3e, N=100 %.3e; mean |gap| N=30 %.3e, N=50 %.3e, N=100 %.3e",
                    sup30, sup100, g30, g50, g100)};
}

Outcome metric_oracles() {
  bmo::Rng rng(bmo::derive_seed(kRootSeed, {9}));
  std::size_t mismatches = 0, self_nonzero = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t dim = 1 + rng.below(4);
    auto draw = [&](std::size_t n) {
      bmo::Matrix A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
      for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = 10.0 * rng.uniform() - 5.0;
      return A;
    };
    const bmo::Matrix A = draw(1 + rng.below(8)), B = draw(1 + rng.below(8));
    oracle::Mat ra, rb;
    for (Eigen::Index i = 0; i < A.rows(); ++i) ra.push_back(to_std(A.row(i).transpose()));
    for (Eigen::Index i = 0; i < B.rows(); ++i) rb.push_back(to_std(B.row(i).transpose()));
    const bmo::PointSet X(A), Y(B);
    if (bmo::generational_distance(X, Y) != oracle::gd(ra, rb)) ++mismatches;
    if (bmo::inverted_generational_distance(X, Y) != oracle::igd(ra, rb)) ++mismatches;
    if (bmo::generational_distance(X, X) != 0.0 || bmo::inverted_generational_distance(X, X) != 0.0) ++self_nonzero;
  }
  return {mismatches == 0 && self_nonzero == 0,
          fmt("%zu mismatches against the double-loop reference, %zu nonzero self-distances (100 pairs)", mismatches,
              self_nonzero)};
}

Outcome determinism() {
  auto c = experiment_config("scaled-med", {"mse"});
  c.samples = {30};
  c.threads = 1;
  const std::string serial = harness::trials_csv(harness::run_experiment(c));
  c.threads = 4;
  const std::string again = harness::trials_csv(harness::run_experiment(c));
  const std::string third = harness::trials_csv(harness::run_experiment(c));
  return {serial == again && again == third,
          fmt("three runs (1 thread, 4 workers, 4 workers again): %zu bytes, %s", serial.size(), serial == again && again == third ? "identical" : "different")};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 MSE band on scaled-MED", scaled_med_mse},
      {"2 GD/IGD magnitudes on skew-3MED and skew-3MMD", skew_distances},
      {"3 surface-wise descent equals the generic loop", equivalence},
      {"4 planted-model recovery", planted_recovery},
      {"5 analytic Pareto map stationarity", stationarity},
      {"6 Jacobians against central differences", jacobians},
      {"7 Z^T G bound, partition of unity and basis norm", gradient_bound},
      {"8 stability trends in N", stability},
      {"9 GD/IGD against the brute-force reference", metric_oracles},
      {"10 per-trial CSV determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
