#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr const char* kToolName = "bezier-mopt";

/// Failure carrying the process exit code and a short machine-readable kind.
class HarnessError : public std::runtime_error {
public:
  HarnessError(int exit_code, std::string kind, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code), kind_(std::move(kind)) {}
  int exit_code() const noexcept { return exit_code_; }
  const std::string& kind() const noexcept { return kind_; }

private:
  int exit_code_;
  std::string kind_;
};

/// Turns any exception into (exit code, error JSON).
struct ErrorReport {
  int exit_code = kExitRuntime;
  nlohmann::json body;
};
ErrorReport describe_error(const std::exception& e);

struct ExperimentConfig {
  std::string problem = "scaled-med";
  std::vector<std::size_t> samples{30};
  std::size_t iterations = 1000;
  std::size_t degree = 3;
  std::string schedule = "harmonic";
  std::string algorithm = "surface"; // surface | generic
  std::string initial_model;         // path to a model JSON, empty = zero control points
  std::size_t resample_retries = 5;
  std::size_t trials = 1;
  std::uint64_t root_seed = 0;
  std::vector<std::string> metrics{"mse"}; // mse | gd | igd | diagnostics
  std::size_t mse_samples = 10000;
  std::size_t model_samples = 1000;   // |X| for gd / igd
  std::size_t validation_size = 1000; // |Y|
  int test_grid_version = 1;
  std::size_t population = 100;       // baseline lattice size
  bool compare = true;                // baseline: also run the proposed method
  std::size_t threads = 0;            // 0 = BEZIER_MOPT_THREADS or hardware
  std::string mode = "perturb";       // diagnostics: perturb | gengap | lemma
  std::size_t perturb_k = 25;
  std::size_t repeats = 10;
  std::size_t holdout = 10000;
  std::string out;
  std::string trace_out;
  std::string trials_csv;
  std::string aggregate_json;

  nlohmann::json to_json() const;
  /// Starts from the defaults; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Throws HarnessError(kExitConfig) on invalid settings.
  void validate() const;
  bool wants(const std::string& metric) const;
};

std::size_t resolve_threads(std::size_t requested);

/// Runs `count` jobs on a pool of `threads` workers; job i always lands in slot i.
template <class Result, class Job>
std::vector<Result> run_pool(std::size_t count, std::size_t threads, Job job);

struct SolveOutput {
  std::string model_json;
  std::string trace_json;
  nlohmann::json lemma;
};

/// One run at samples[0] with seed root_seed.
SolveOutput run_solve(const ExperimentConfig& config);

struct TrialResult {
  std::size_t samples = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::map<std::string, double> values;
  double wall_seconds = 0.0;
};

struct MetricAggregate {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
  bool sd_degenerate = false; ///< fewer than two successful trials
};

struct SettingAggregate {
  std::size_t samples = 0;
  std::size_t trials = 0;
  std::size_t failed = 0;
  std::map<std::string, MetricAggregate> metrics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> columns; ///< metric columns in CSV order
  std::vector<TrialResult> trials;  ///< ordered by (samples, trial)
  std::vector<SettingAggregate> settings;
  nlohmann::json validation;        ///< null when no validation set was needed
  std::vector<std::string> warnings;
};

ExperimentReport run_experiment(const ExperimentConfig& config);
MetricAggregate aggregate(const std::vector<double>& values);
std::string trials_csv(const ExperimentReport& report);
nlohmann::json aggregate_json(const ExperimentReport& report);

struct BaselineOutput {
  std::string model_json;
  nlohmann::json report;
};

/// Lattice scalarization sweep followed by one least-squares fit.
BaselineOutput run_baseline(const ExperimentConfig& config);

/// n rows of t_1..t_M,x_1..x_L from a model JSON document.
std::string sample_csv(const std::string& model_json, std::size_t n, std::uint64_t seed);

struct MetricsInput {
  std::string x_csv;       // points file for X
  std::string model_json;  // alternative source of X, and required for mse
  std::string y_csv;       // points file for Y
  std::string problem;     // source of Y (validation sweep) and of the map for mse
};

nlohmann::json compute_metrics(const ExperimentConfig& config, const MetricsInput& input);

struct DiagnosticsOutput {
  std::string csv;     ///< perturb mode only
  nlohmann::json report;
};

DiagnosticsOutput run_diagnostics(const ExperimentConfig& config);

/// Reads a points CSV with a header row. Columns named x_* are used when present.
std::vector<std::vector<double>> read_points_csv(const std::string& text);

std::string format_double(double v);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace harness

#include "harness_pool.hpp"
