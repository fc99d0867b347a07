#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bmo {

/// SplitMix64 finalizer. Used to derive independent seeds from (root, i, j, ...).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds each tag into the root seed with mix64. Stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) noexcept;

/// Seed of trial `index` in a multi-trial experiment. Adding trials never changes earlier ones.
inline std::uint64_t trial_seed(std::uint64_t root, std::uint64_t index) noexcept { return derive_seed(root, {index}); }

/// Portable random stream: mt19937_64 plus distribution code written out here,
/// since the standard distributions are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Unit-rate exponential.
  double exponential();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 engine_;
};

} // namespace bmo
