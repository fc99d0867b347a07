#include "bmo/simplex.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bmo/error.hpp"
#include "bmo/rng.hpp"

namespace bmo {

namespace {

Vector validated(Vector v) {
  if (v.size() == 0) throw DomainError("weight vector must be nonempty");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw DomainError("weight vector has a non-finite entry");
    if (v[i] < 0.0) {
      if (v[i] < -WeightVector::kRenormalizeTolerance)
        throw DomainError("weight vector has a negative entry " + std::to_string(v[i]));
      v[i] = 0.0;
    }
  }
  const double sum = v.sum();
  if (std::abs(sum - 1.0) > WeightVector::kRenormalizeTolerance)
    throw DomainError("weight vector entries sum to " + std::to_string(sum) + ", not 1");
  if (sum != 1.0) v /= sum;
  return v;
}

// binom(n, k) exactly, or nullopt on 64-bit overflow.
std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

// D! / prod(d_m!) as a product of binomials; exact unless it exceeds 2^64.
std::optional<std::uint64_t> multinomial(const MultiIndex& d) {
  std::uint64_t remaining = 0;
  for (unsigned e : d) remaining += e;
  unsigned __int128 acc = 1;
  for (unsigned e : d) {
    const auto b = binomial(remaining, e);
    if (!b) return std::nullopt;
    acc *= *b;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    remaining -= e;
  }
  return static_cast<std::uint64_t>(acc);
}

double log_multinomial(const MultiIndex& d) {
  double D = 0.0;
  double acc = 0.0;
  for (unsigned e : d) {
    D += e;
    acc -= std::lgamma(static_cast<double>(e) + 1.0);
  }
  return acc + std::lgamma(D + 1.0);
}

void enumerate_into(std::vector<MultiIndex>& out, MultiIndex& prefix, std::size_t M, unsigned remaining) {
  if (prefix.size() + 1 == M) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (unsigned e = remaining + 1; e-- > 0;) {
    prefix.push_back(e);
    enumerate_into(out, prefix, M, remaining - e);
    prefix.pop_back();
  }
}

} // namespace

WeightVector::WeightVector(Vector entries) : entries_(validated(std::move(entries))) {}

WeightVector::WeightVector(std::initializer_list<double> entries)
    : WeightVector(std::span<const double>(entries.begin(), entries.size())) {}

WeightVector::WeightVector(std::span<const double> entries)
    : WeightVector(Vector(Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size())))) {}

WeightVector WeightVector::vertex(std::size_t M, std::size_t m) {
  if (m >= M) throw DomainError("vertex index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(M));
  v[static_cast<Eigen::Index>(m)] = 1.0;
  return WeightVector(std::move(v));
}

WeightVector WeightVector::barycenter(std::size_t M) {
  if (M == 0) throw DomainError("simplex dimension must be positive");
  return WeightVector(Vector::Constant(static_cast<Eigen::Index>(M), 1.0 / static_cast<double>(M)));
}

std::size_t multi_index_count(std::size_t M, std::size_t D) {
  if (M == 0) return 0;
  const auto c = binomial(D + M - 1, M - 1);
  if (!c) throw DomainError("multi-index set too large");
  return static_cast<std::size_t>(*c);
}

MultiIndexSet::MultiIndexSet(std::size_t M, std::size_t D) : M_(M), D_(D) {}

MultiIndexSet MultiIndexSet::enumerate(std::size_t M, std::size_t D) {
  if (M == 0) throw DomainError("number of objectives M must be at least 1");
  if (D == 0) throw DomainError("degree D must be at least 1");
  MultiIndexSet set(M, D);
  set.indices_.reserve(multi_index_count(M, D));
  MultiIndex prefix;
  prefix.reserve(M);
  enumerate_into(set.indices_, prefix, M, static_cast<unsigned>(D));

  set.coefficients_.reserve(set.indices_.size());
  for (const auto& d : set.indices_) {
    if (const auto c = multinomial(d)) {
      set.coefficients_.push_back(static_cast<double>(*c));
    } else {
      // Log-space fallback: relative error of a few ulps times log(D!).
      set.exact_ = false;
      set.coefficients_.push_back(std::exp(log_multinomial(d)));
    }
  }
  return set;
}

std::optional<std::size_t> MultiIndexSet::position(const MultiIndex& d) const {
  if (d.size() != M_) return std::nullopt;
  std::size_t sum = 0;
  for (unsigned e : d) sum += e;
  if (sum != D_) return std::nullopt;
  // Count the indices that precede d in reverse-lexicographic order.
  std::size_t pos = 0;
  std::size_t remaining = D_;
  for (std::size_t m = 0; m + 1 < M_; ++m) {
    for (std::size_t e = remaining; e > d[m]; --e) pos += multi_index_count(M_ - m - 1, remaining - e);
    remaining -= d[m];
  }
  return pos;
}

std::size_t MultiIndexSet::vertex_position(std::size_t m) const {
  if (m >= M_) throw DomainError("vertex index out of range");
  MultiIndex d(M_, 0u);
  d[m] = static_cast<unsigned>(D_);
  return *position(d);
}

Vector bernstein_vector(const WeightVector& t, const MultiIndexSet& basis) {
  const std::size_t M = basis.num_objectives();
  const std::size_t D = basis.degree();
  if (t.size() != M)
    throw DomainError("weight has " + std::to_string(t.size()) + " entries, basis expects " + std::to_string(M));

  // powers(m, e) = t_m^e
  Matrix powers(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(D + 1));
  for (std::size_t m = 0; m < M; ++m) {
    double p = 1.0;
    for (std::size_t e = 0; e <= D; ++e) {
      powers(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(e)) = p;
      p *= t[m];
    }
  }

  const auto& indices = basis.indices();
  const auto& coefficients = basis.coefficients();
  Vector z(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    double v = coefficients[i];
    for (std::size_t m = 0; m < M; ++m) v *= powers(static_cast<Eigen::Index>(m), indices[i][m]);
    z[static_cast<Eigen::Index>(i)] = v;
  }
  return z;
}

std::vector<WeightVector> sample_uniform_simplex(std::size_t M, std::size_t n, std::uint64_t seed) {
  if (M == 0) throw DomainError("number of objectives M must be at least 1");
  if (n == 0) throw DomainError("sample size must be at least 1");
  Rng rng(seed);
  std::vector<WeightVector> out;
  out.reserve(n);
  Vector e(static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < e.size(); ++m) e[m] = rng.exponential();
    out.emplace_back(Vector(e / e.sum()));
  }
  return out;
}

std::vector<WeightVector> lattice_weights(std::size_t M, std::size_t count) {
  if (M == 0) throw DomainError("number of objectives M must be at least 1");
  if (count == 0) throw DomainError("lattice size must be at least 1");
  if (count == 1 || M == 1) return std::vector<WeightVector>(count, WeightVector::barycenter(M));

  std::size_t H = 1;
  while (multi_index_count(M, H) < count) ++H;
  const auto lattice = MultiIndexSet::enumerate(M, H);
  const std::size_t size = lattice.size();

  std::vector<WeightVector> out;
  out.reserve(count);
  Vector w(static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < count; ++i) {
    const auto& d = lattice.indices()[i * size / count];
    for (std::size_t m = 0; m < M; ++m) w[static_cast<Eigen::Index>(m)] = static_cast<double>(d[m]) / static_cast<double>(H);
    out.emplace_back(w);
  }
  return out;
}

} // namespace bmo
