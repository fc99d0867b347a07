#pragma once

// Independent reference implementations used to check the library. They share no
// code with it and favour the most literal formulation over speed.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major, rows are Vec

/// Binomial coefficient from Pascal's triangle.
inline double binomial(unsigned n, unsigned k) {
  std::vector<std::vector<double>> row(n + 1, std::vector<double>(n + 1, 0.0));
  for (unsigned i = 0; i <= n; ++i) {
    row[i][0] = 1.0;
    for (unsigned j = 1; j <= i; ++j) row[i][j] = row[i - 1][j - 1] + (j <= i - 1 ? row[i - 1][j] : 0.0);
  }
  return k > n ? 0.0 : row[n][k];
}

/// D! / prod d_m! as a product of binomials, built from Pascal's triangle.
inline double multinomial(const std::vector<unsigned>& d) {
  unsigned remaining = 0;
  for (unsigned v : d) remaining += v;
  double c = 1.0;
  for (unsigned v : d) {
    c *= binomial(remaining, v);
    remaining -= v;
  }
  return c;
}

/// All exponent vectors of length M summing to D, by brute-force counting in base D+1,
/// in reverse-lexicographic order.
inline std::vector<std::vector<unsigned>> multi_indices(unsigned M, unsigned D) {
  std::vector<std::vector<unsigned>> all;
  std::vector<unsigned> d(M, 0);
  std::uint64_t total = 1;
  for (unsigned m = 0; m < M; ++m) total *= D + 1;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    unsigned sum = 0;
    for (unsigned m = 0; m < M; ++m) {
      d[M - 1 - m] = static_cast<unsigned>(c % (D + 1));
      c /= D + 1;
      sum += d[M - 1 - m];
    }
    if (sum == D) all.push_back(d);
  }
  // code order is lexicographic ascending; reverse for (D,0,..,0) first
  return {all.rbegin(), all.rend()};
}

/// z_i(t) = multinomial(d_i) * prod t_m^{d_im}, by repeated multiplication.
inline Vec bernstein(const Vec& t, unsigned D) {
  const auto idx = multi_indices(static_cast<unsigned>(t.size()), D);
  Vec z;
  for (const auto& d : idx) {
    double v = multinomial(d);
    for (std::size_t m = 0; m < t.size(); ++m)
      for (unsigned e = 0; e < d[m]; ++e) v *= t[m];
    z.push_back(v);
  }
  return z;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline Vec gauss_solve(Mat A, Vec b) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    if (A[c][c] == 0.0) throw std::runtime_error("singular system");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t j = c; j < n; ++j) A[r][j] -= f * A[c][j];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

/// Least squares via the normal equations Z^T Z P = Z^T X, column by column.
inline Mat normal_equations(const Mat& Z, const Mat& X) {
  const std::size_t N = Z.size(), K = Z[0].size(), L = X[0].size();
  Mat G(K, Vec(K, 0.0));
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j)
      for (std::size_t n = 0; n < N; ++n) G[i][j] += Z[n][i] * Z[n][j];
  Mat P(K, Vec(L, 0.0));
  for (std::size_t l = 0; l < L; ++l) {
    Vec rhs(K, 0.0);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t n = 0; n < N; ++n) rhs[i] += Z[n][i] * X[n][l];
    const Vec col = gauss_solve(G, rhs);
    for (std::size_t i = 0; i < K; ++i) P[i][l] = col[i];
  }
  return P;
}

inline double distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Generational distance by the textbook double loop.
inline double gd(const Mat& X, const Mat& Y) {
  double total = 0.0;
  for (const auto& x : X) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : Y) {
      const double d = distance(x, y);
      if (d < best) best = d;
    }
    total += best;
  }
  return total / static_cast<double>(X.size());
}

inline double igd(const Mat& X, const Mat& Y) { return gd(Y, X); }

/// Central finite-difference Jacobian of f: R^L -> R^M.
template <class F>
Mat fd_jacobian(F f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat J(f0.size(), Vec(x.size(), 0.0));
  for (std::size_t l = 0; l < x.size(); ++l) {
    Vec xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    const Vec fp = f(xp), fm = f(xm);
    for (std::size_t m = 0; m < f0.size(); ++m) J[m][l] = (fp[m] - fm[m]) / (2 * h);
  }
  return J;
}

/// Scaled-MED written out from its definition: f_m(x) = sum_l w_ml (x_l - c_ml)^2,
/// W = [[1,3,2],[2,1,3],[3,2,1]], C = [[0,1,1],[1,0,1],[1,1,-1]].
inline Vec scaled_med_objectives(const Vec& x) {
  const double W[3][3] = {{1, 3, 2}, {2, 1, 3}, {3, 2, 1}};
  const double C[3][3] = {{0, 1, 1}, {1, 0, 1}, {1, 1, -1}};
  Vec f(3, 0.0);
  for (int m = 0; m < 3; ++m)
    for (int l = 0; l < 3; ++l) f[m] += W[m][l] * (x[l] - C[m][l]) * (x[l] - C[m][l]);
  return f;
}

/// Minimizes sum_m t_m f_m for scaled-MED by plain gradient descent with a
/// fixed step, until the gradient norm drops below tol.
inline Vec scaled_med_descent(const Vec& t, double step, double tol, std::size_t max_steps) {
  const double W[3][3] = {{1, 3, 2}, {2, 1, 3}, {3, 2, 1}};
  const double C[3][3] = {{0, 1, 1}, {1, 0, 1}, {1, 1, -1}};
  Vec x(3, 0.0);
  for (std::size_t s = 0; s < max_steps; ++s) {
    Vec g(3, 0.0);
    for (int m = 0; m < 3; ++m)
      for (int l = 0; l < 3; ++l) g[l] += t[m] * 2 * W[m][l] * (x[l] - C[m][l]);
    double n = 0.0;
    for (double v : g) n += v * v;
    if (std::sqrt(n) < tol) return x;
    for (int l = 0; l < 3; ++l) x[l] -= step * g[l];
  }
  throw std::runtime_error("descent oracle did not converge");
}

/// Skew-MED from its definition: f_m = ((1/sqrt 2) ||x - e_m||^2)^{p_m}.
inline Vec skew_med_objectives(const Vec& x) {
  const std::size_t M = x.size();
  Vec f(M);
  for (std::size_t m = 0; m < M; ++m) {
    double d2 = 0.0;
    for (std::size_t l = 0; l < M; ++l) d2 += std::pow(x[l] - (l == m ? 1.0 : 0.0), 2);
    const double p = std::exp(2.0 * static_cast<double>(m) / static_cast<double>(M - 1) - 1.0);
    f[m] = std::pow(d2 / std::sqrt(2.0), p);
  }
  return f;
}

/// The three-objective skew-MMD instance: A_m = diag with 3/5 at slot m and 4/5 elsewhere,
/// c_m = e_m, f_m = ||A_m (x - c_m)||^{p_m}.
inline Vec skew_mmd3_objectives(const Vec& x) {
  Vec f(3);
  for (std::size_t m = 0; m < 3; ++m) {
    double s = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
      const double a = l == m ? 0.6 : 0.8;
      const double v = a * (x[l] - (l == m ? 1.0 : 0.0));
      s += v * v;
    }
    const double p = std::exp(static_cast<double>(m) - 1.0);
    f[m] = std::pow(std::sqrt(s), p);
  }
  return f;
}

} // namespace oracle
