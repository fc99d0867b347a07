#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bmo/bmo.h"
#include "harness.hpp"

using harness::ExperimentConfig;

namespace {

// Flags bound to config fields; only flags that were actually given override the config file.
class Flags {
public:
  explicit Flags(CLI::App* app) : app_(app) { app_->add_option("--config", config_path_, "JSON config file"); }

  template <class T>
  CLI::Option* bind(const std::string& names, T ExperimentConfig::*field, const std::string& help) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(names, *store, help);
    apply_.push_back([store, opt, field](ExperimentConfig& c) {
      if (opt->count() > 0) c.*field = *store;
    });
    return opt;
  }

  void flag(const std::string& names, bool ExperimentConfig::*field, bool value, const std::string& help) {
    CLI::Option* opt = app_->add_flag(names, help);
    apply_.push_back([opt, field, value](ExperimentConfig& c) {
      if (opt->count() > 0) c.*field = value;
    });
  }

  void solver_options(bool k_is_perturbation) {
    bind("--problem", &ExperimentConfig::problem, "problem name");
    bind("--n", &ExperimentConfig::samples, "samples per iteration (comma list allowed)")->delimiter(',');
    if (k_is_perturbation) {
      bind("--k", &ExperimentConfig::perturb_k, "perturbed iteration");
      bind("--iterations", &ExperimentConfig::iterations, "iteration count K");
    } else {
      bind("--k,--iterations", &ExperimentConfig::iterations, "iteration count K");
    }
    bind("--degree", &ExperimentConfig::degree, "Bezier degree D");
    bind("--schedule", &ExperimentConfig::schedule, "step schedule: harmonic | constant:<alpha>");
    bind("--algorithm", &ExperimentConfig::algorithm, "surface | generic");
    bind("--initial", &ExperimentConfig::initial_model, "model JSON used as the initial control points");
    bind("--retries", &ExperimentConfig::resample_retries, "resample attempts for a singular design");
    bind("--seed", &ExperimentConfig::root_seed, "root seed");
    bind("--threads", &ExperimentConfig::threads, "worker threads (default: BEZIER_MOPT_THREADS or all cores)");
  }

  void metric_options() {
    bind("--metrics", &ExperimentConfig::metrics, "mse, gd, igd, diagnostics")->delimiter(',');
    bind("--mse-samples", &ExperimentConfig::mse_samples, "uniform weights used for MSE");
    bind("--model-samples", &ExperimentConfig::model_samples, "points sampled from the model for GD/IGD");
    bind("--validation-size", &ExperimentConfig::validation_size, "validation set size");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path_.empty()) c = ExperimentConfig::from_json(nlohmann::json::parse(harness::read_file(config_path_)));
    for (const auto& f : apply_) f(c);
    return c;
  }

private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::function<void(ExperimentConfig&)>> apply_;
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else harness::write_file(path, content);
}

std::string default_trace_path(const std::string& model_path) {
  const std::string ext = ".json";
  if (model_path.size() > ext.size() && model_path.compare(model_path.size() - ext.size(), ext.size(), ext) == 0)
    return model_path.substr(0, model_path.size() - ext.size()) + ".trace.json";
  return model_path + ".trace.json";
}

int report_error(const std::exception& e) {
  const auto r = harness::describe_error(e);
  std::cerr << r.body.dump() << "\n";
  return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto set approximation with Bezier simplices"};
  app.set_version_flag("--version", std::string(harness::kToolName) + " " + bmo_version());
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "train one model");
  Flags solve_flags(solve);
  solve_flags.solver_options(false);
  solve_flags.bind("--out", &ExperimentConfig::out, "model JSON path");
  solve_flags.bind("--trace", &ExperimentConfig::trace_out, "trace JSON path");

  CLI::App* experiment = app.add_subcommand("experiment", "repeated seeded trials with metrics");
  Flags exp_flags(experiment);
  exp_flags.solver_options(false);
  exp_flags.metric_options();
  exp_flags.bind("--trials", &ExperimentConfig::trials, "trials per sample size");
  exp_flags.bind("--csv", &ExperimentConfig::trials_csv, "per-trial CSV path");
  exp_flags.bind("--json", &ExperimentConfig::aggregate_json, "aggregate JSON path (default stdout)");

  CLI::App* baseline = app.add_subcommand("baseline", "scalarization sweep + single fit");
  Flags base_flags(baseline);
  base_flags.solver_options(false);
  base_flags.metric_options();
  base_flags.bind("--population,--p", &ExperimentConfig::population, "number of lattice weights");
  base_flags.bind("--trials", &ExperimentConfig::trials, "trials of the proposed method in the comparison");
  base_flags.flag("--no-compare", &ExperimentConfig::compare, false, "skip the proposed-method comparison");
  base_flags.bind("--out", &ExperimentConfig::out, "model JSON path");
  base_flags.bind("--json", &ExperimentConfig::aggregate_json, "report JSON path (default stdout)");

  CLI::App* sample = app.add_subcommand("sample", "evaluate a model at uniform weights");
  std::string sample_model, sample_out;
  std::size_t sample_n = 100;
  std::uint64_t sample_seed = 0;
  sample->add_option("--model", sample_model, "model JSON")->required();
  sample->add_option("--n", sample_n, "number of rows");
  sample->add_option("--seed", sample_seed, "seed");
  sample->add_option("--out", sample_out, "CSV path (default stdout)");

  CLI::App* metrics = app.add_subcommand("metrics", "GD / IGD / MSE between files");
  Flags metric_flags(metrics);
  metric_flags.metric_options();
  metric_flags.bind("--problem", &ExperimentConfig::problem, "problem for the validation set and MSE");
  metric_flags.bind("--seed", &ExperimentConfig::root_seed, "seed for model sampling");
  metric_flags.bind("--threads", &ExperimentConfig::threads, "worker threads");
  metric_flags.bind("--json", &ExperimentConfig::aggregate_json, "report JSON path (default stdout)");
  std::string x_path, y_path, metrics_model;
  metrics->add_option("--x", x_path, "points CSV for X");
  metrics->add_option("--y", y_path, "points CSV for Y");
  metrics->add_option("--model", metrics_model, "model JSON (source of X, needed for MSE)");

  CLI::App* diagnostics = app.add_subcommand("diagnostics", "stability diagnostics");
  Flags diag_flags(diagnostics);
  diag_flags.solver_options(true);
  diag_flags.bind("--mode", &ExperimentConfig::mode, "perturb | gengap | lemma");
  diag_flags.bind("--repeats", &ExperimentConfig::repeats, "perturbation repeats");
  diag_flags.bind("--holdout", &ExperimentConfig::holdout, "held-out weights for the gap");
  diag_flags.bind("--trials", &ExperimentConfig::trials, "trials per sample size");
  diag_flags.bind("--out", &ExperimentConfig::out, "perturb CSV path (default stdout)");
  diag_flags.bind("--json", &ExperimentConfig::aggregate_json, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(harness::HarnessError(harness::kExitConfig, "usage_error", e.what()));
  }

  try {
    if (solve->parsed()) {
      ExperimentConfig c = solve_flags.resolve();
      if (c.out.empty()) c.out = "model.json";
      if (c.trace_out.empty()) c.trace_out = default_trace_path(c.out);
      c.validate();
      const auto out = harness::run_solve(c);
      harness::write_file(c.out, out.model_json);
      harness::write_file(c.trace_out, out.trace_json);
    } else if (experiment->parsed()) {
      ExperimentConfig c = exp_flags.resolve();
      const auto report = harness::run_experiment(c);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      if (!c.trials_csv.empty()) harness::write_file(c.trials_csv, harness::trials_csv(report));
      emit(c.aggregate_json, harness::aggregate_json(report).dump(2) + "\n");
    } else if (baseline->parsed()) {
      ExperimentConfig c = base_flags.resolve();
      if (c.out.empty()) c.out = "baseline.json";
      const auto out = harness::run_baseline(c);
      harness::write_file(c.out, out.model_json);
      emit(c.aggregate_json, out.report.dump(2) + "\n");
    } else if (sample->parsed()) {
      emit(sample_out, harness::sample_csv(harness::read_file(sample_model), sample_n, sample_seed));
    } else if (metrics->parsed()) {
      ExperimentConfig c = metric_flags.resolve();
      if (!metrics->get_option("--metrics")->count() && c.metrics == ExperimentConfig{}.metrics) c.metrics.clear();
      harness::MetricsInput input;
      if (!x_path.empty()) input.x_csv = harness::read_file(x_path);
      if (!y_path.empty()) input.y_csv = harness::read_file(y_path);
      if (!metrics_model.empty()) input.model_json = harness::read_file(metrics_model);
      if (metrics->get_option("--problem")->count() > 0) input.problem = c.problem;
      emit(c.aggregate_json, harness::compute_metrics(c, input).dump(2) + "\n");
    } else if (diagnostics->parsed()) {
      ExperimentConfig c = diag_flags.resolve();
      const auto out = harness::run_diagnostics(c);
      if (c.mode == "perturb") {
        emit(c.out, out.csv);
        if (!c.aggregate_json.empty()) harness::write_file(c.aggregate_json, out.report.dump(2) + "\n");
      } else {
        emit(c.aggregate_json.empty() ? c.out : c.aggregate_json, out.report.dump(2) + "\n");
      }
    }
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return harness::kExitOk;
}
