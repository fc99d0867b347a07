#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmo {

/// Precondition or dimension violation on a public operation.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid solver or experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed model or trace document.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A metric that needs the analytical Pareto map was requested on a problem without one.
class UnsupportedMetricError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The design matrix of a least-squares fit is numerically rank deficient.
class SingularFitError : public std::runtime_error {
public:
  SingularFitError(double sigma_min, double sigma_max)
      : std::runtime_error("singular design matrix: smallest singular value " + std::to_string(sigma_min) +
                           " vs largest " + std::to_string(sigma_max)),
        sigma_min_(sigma_min), sigma_max_(sigma_max) {}

  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }

private:
  double sigma_min_;
  double sigma_max_;
};

/// A solver run gave up after exhausting its resampling budget at one iteration.
class SolverAbort : public std::runtime_error {
public:
  SolverAbort(std::size_t iteration, std::size_t attempts, double sigma_min)
      : std::runtime_error("solver aborted at iteration " + std::to_string(iteration) + " after " +
                           std::to_string(attempts) + " singular fits (smallest singular value " +
                           std::to_string(sigma_min) + ")"),
        iteration_(iteration), attempts_(attempts), sigma_min_(sigma_min) {}

  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t attempts() const noexcept { return attempts_; }
  double sigma_min() const noexcept { return sigma_min_; }

private:
  std::size_t iteration_;
  std::size_t attempts_;
  double sigma_min_;
};

} // namespace bmo
