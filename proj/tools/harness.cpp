#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "handles.hpp"

namespace harness {

namespace {

// Stream tags for seeds derived from a trial seed.
constexpr std::uint64_t kMseTag = 0x6d7365;    // "mse"
constexpr std::uint64_t kSampleTag = 0x787374; // "xst"

const std::set<std::string> kKnownMetrics{"mse", "gd", "igd", "diagnostics"};
const std::set<std::string> kModes{"perturb", "gengap", "lemma"};

nlohmann::json envelope(const ExperimentConfig& config) {
  return {{"tool", kToolName}, {"version", bmo_version()}, {"config", config.to_json()}};
}

HarnessError config_error(const std::string& message) { return HarnessError(kExitConfig, "config_error", message); }

int exit_code_for(bmo_status status) {
  switch (status) {
  case BMO_ERR_SINGULAR:
  case BMO_ERR_SOLVER_ABORT:
  case BMO_ERR_RUNTIME: return kExitRuntime;
  default: return kExitConfig;
  }
}

std::vector<double> flat_rows(const std::vector<std::vector<double>>& rows, std::size_t& dim) {
  if (rows.empty()) throw config_error("point set is empty");
  dim = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw config_error("point set rows have different lengths");
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

bmo_solver_config solver_config(const ExperimentConfig& c, std::size_t samples, std::uint64_t seed,
                                const bmo_model* initial) {
  bmo_solver_config s;
  bmo_solver_config_init(&s);
  s.samples = samples;
  s.iterations = c.iterations;
  s.degree = c.degree;
  s.schedule = c.schedule.c_str();
  s.seed = seed;
  s.resample_retries = c.resample_retries;
  s.algorithm = c.algorithm == "generic" ? BMO_GENERIC_GD : BMO_SURFACE_GD;
  s.initial = initial;
  return s;
}

ModelHandle load_initial(const ExperimentConfig& c) {
  if (c.initial_model.empty()) return nullptr;
  return load_model_json(read_file(c.initial_model));
}

struct ValidationSet {
  Points points;
  std::size_t converged = 0;
  nlohmann::json describe() const {
    return {{"source", "scalarization sweep over lattice weights (stand-in for an NSGA-II population)"},
            {"points", points.rows},
            {"converged", converged}};
  }
};

struct SweepOutput {
  Points weights;
  Points points;
  std::vector<int> converged;
  std::size_t converged_count() const { return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), 1)); }
};

SweepOutput lattice_sweep(const bmo_problem* problem, std::size_t count, std::size_t threads) {
  const std::size_t M = bmo_problem_num_objectives(problem);
  const std::size_t L = bmo_problem_dimension(problem);
  SweepOutput out;
  out.weights = Points(count, M);
  out.points = Points(count, L);
  out.converged.assign(count, 0);
  check(bmo_lattice_weights(M, count, out.weights.data.data()));
  bmo_sweep_options options;
  bmo_sweep_options_init(&options);
  options.threads = threads;
  check(bmo_scalarization_sweep(problem, out.weights.data.data(), count, &options, out.points.data.data(),
                                out.converged.data()));
  return out;
}

ValidationSet validation_set(const bmo_problem* problem, std::size_t count, std::size_t threads) {
  SweepOutput sweep = lattice_sweep(problem, count, threads);
  ValidationSet v;
  v.converged = sweep.converged_count();
  v.points = std::move(sweep.points);
  return v;
}

Points sample_model_points(const bmo_model* model, std::size_t n, std::uint64_t seed) {
  Points X(n, bmo_model_dimension(model));
  check(bmo_model_sample(model, n, seed, nullptr, X.data.data()));
  return X;
}

std::pair<double, double> distances(const Points& X, const Points& Y) {
  if (X.cols != Y.cols) throw config_error("point sets have different dimensions");
  double gd = 0.0, igd = 0.0;
  check(bmo_gd(X.data.data(), X.rows, Y.data.data(), Y.rows, X.cols, &gd));
  check(bmo_igd(X.data.data(), X.rows, Y.data.data(), Y.rows, X.cols, &igd));
  return {gd, igd};
}

nlohmann::json parse_owned(char* s) { return nlohmann::json::parse(take_string(s)); }

std::string error_text(const std::exception& e) {
  if (const auto* api = dynamic_cast<const ApiError*>(&e)) return std::string(bmo_status_name(api->status())) + ": " + e.what();
  return e.what();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& field) {
  try {
    field = j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(std::string("config key '") + key + "' has the wrong type");
  }
}

} // namespace

ErrorReport describe_error(const std::exception& e) {
  ErrorReport r;
  std::string kind = "runtime_error";
  if (const auto* h = dynamic_cast<const HarnessError*>(&e)) {
    r.exit_code = h->exit_code();
    kind = h->kind();
  } else if (const auto* api = dynamic_cast<const ApiError*>(&e)) {
    r.exit_code = exit_code_for(api->status());
    kind = bmo_status_name(api->status());
  } else if (dynamic_cast<const nlohmann::json::exception*>(&e)) {
    r.exit_code = kExitConfig;
    kind = "config_error";
  }
  r.body = {{"error", {{"kind", kind}, {"message", e.what()}, {"exit_code", r.exit_code}}},
            {"tool", kToolName},
            {"version", bmo_version()}};
  return r;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"problem", problem},
          {"samples", samples},
          {"iterations", iterations},
          {"degree", degree},
          {"schedule", schedule},
          {"algorithm", algorithm},
          {"initial_model", initial_model},
          {"resample_retries", resample_retries},
          {"trials", trials},
          {"root_seed", root_seed},
          {"metrics", metrics},
          {"mse_samples", mse_samples},
          {"model_samples", model_samples},
          {"validation_size", validation_size},
          {"test_grid_version", test_grid_version},
          {"population", population},
          {"compare", compare},
          {"threads", threads},
          {"mode", mode},
          {"perturb_k", perturb_k},
          {"repeats", repeats},
          {"holdout", holdout},
          {"out", out},
          {"trace_out", trace_out},
          {"trials_csv", trials_csv},
          {"aggregate_json", aggregate_json}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "problem") read_key(value, "problem", c.problem);
    else if (key == "samples") {
      if (value.is_array()) read_key(value, "samples", c.samples);
      else {
        std::size_t n = 0;
        read_key(value, "samples", n);
        c.samples = {n};
      }
    } else if (key == "iterations") read_key(value, "iterations", c.iterations);
    else if (key == "degree") read_key(value, "degree", c.degree);
    else if (key == "schedule") read_key(value, "schedule", c.schedule);
    else if (key == "algorithm") read_key(value, "algorithm", c.algorithm);
    else if (key == "initial_model") read_key(value, "initial_model", c.initial_model);
    else if (key == "resample_retries") read_key(value, "resample_retries", c.resample_retries);
    else if (key == "trials") read_key(value, "trials", c.trials);
    else if (key == "root_seed") read_key(value, "root_seed", c.root_seed);
    else if (key == "metrics") read_key(value, "metrics", c.metrics);
    else if (key == "mse_samples") read_key(value, "mse_samples", c.mse_samples);
    else if (key == "model_samples") read_key(value, "model_samples", c.model_samples);
    else if (key == "validation_size") read_key(value, "validation_size", c.validation_size);
    else if (key == "test_grid_version") read_key(value, "test_grid_version", c.test_grid_version);
    else if (key == "population") read_key(value, "population", c.population);
    else if (key == "compare") read_key(value, "compare", c.compare);
    else if (key == "threads") read_key(value, "threads", c.threads);
    else if (key == "mode") read_key(value, "mode", c.mode);
    else if (key == "perturb_k") read_key(value, "perturb_k", c.perturb_k);
    else if (key == "repeats") read_key(value, "repeats", c.repeats);
    else if (key == "holdout") read_key(value, "holdout", c.holdout);
    else if (key == "out") read_key(value, "out", c.out);
    else if (key == "trace_out") read_key(value, "trace_out", c.trace_out);
    else if (key == "trials_csv") read_key(value, "trials_csv", c.trials_csv);
    else if (key == "aggregate_json") read_key(value, "aggregate_json", c.aggregate_json);
    else throw config_error("unknown config key '" + key + "'");
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw config_error("trials must be at least 1");
  if (samples.empty()) throw config_error("at least one sample size is required");
  if (algorithm != "surface" && algorithm != "generic")
    throw config_error("algorithm must be 'surface' or 'generic', got '" + algorithm + "'");
  for (const auto& m : metrics)
    if (!kKnownMetrics.count(m)) throw config_error("unknown metric '" + m + "'");
  if (!kModes.count(mode)) throw config_error("unknown diagnostics mode '" + mode + "'");
  if (test_grid_version != 1) throw config_error("unsupported test grid version " + std::to_string(test_grid_version));
  if (mse_samples < 1 || model_samples < 1 || validation_size < 1) throw config_error("metric sizes must be positive");
  if (repeats < 1) throw config_error("repeats must be at least 1");
  if (holdout < 1) throw config_error("holdout must be at least 1");

  // Resolves the problem name and lets the solver check N, K, D and the schedule.
  ProblemHandle p = make_problem(problem);
  ModelHandle initial = load_initial(*this);
  bmo_solver_config s = solver_config(*this, samples.front(), root_seed, initial.get());
  for (std::size_t n : samples) {
    s.samples = n;
    check(bmo_solver_config_check(p.get(), &s));
  }
}

bool ExperimentConfig::wants(const std::string& metric) const {
  return std::find(metrics.begin(), metrics.end(), metric) != metrics.end();
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BEZIER_MOPT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw HarnessError(kExitRuntime, "io_error", "cannot write '" + path + "'");
  out << content;
  if (!out) throw HarnessError(kExitRuntime, "io_error", "failed writing '" + path + "'");
}

SolveOutput run_solve(const ExperimentConfig& config) {
  ProblemHandle problem = make_problem(config.problem);
  ModelHandle initial = load_initial(config);
  const bmo_solver_config s = solver_config(config, config.samples.front(), config.root_seed, initial.get());
  bmo_run* raw = nullptr;
  check(bmo_solve(problem.get(), &s, &raw));
  RunHandle run(raw);
  bmo_model* m = nullptr;
  check(bmo_run_model(run.get(), &m));
  ModelHandle model(m);

  SolveOutput out;
  out.model_json = model_json(model.get(), envelope(config).dump());
  char* text = nullptr;
  check(bmo_run_trace_json(run.get(), &text));
  nlohmann::json trace = parse_owned(text);
  check(bmo_run_lemma_json(run.get(), &text));
  out.lemma = parse_owned(text);
  nlohmann::json doc = envelope(config);
  doc["trace"] = std::move(trace);
  doc["lemma"] = out.lemma;
  out.trace_json = doc.dump(2) + "\n";
  return out;
}

MetricAggregate aggregate(const std::vector<double>& values) {
  MetricAggregate a;
  a.count = values.size();
  if (values.empty()) {
    a.mean = std::nan("");
    a.sd = std::nan("");
    a.sd_degenerate = true;
    return a;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    a.sd = 0.0;
    a.sd_degenerate = true;
    return a;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return a;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t threads = resolve_threads(config.threads);
  ProblemHandle problem = make_problem(config.problem);
  ModelHandle initial = load_initial(config);

  ExperimentReport report;
  report.config = config;
  const bool distances_wanted = config.wants("gd") || config.wants("igd");
  for (const char* m : {"mse", "gd", "igd"})
    if (config.wants(m)) report.columns.emplace_back(m);
  if (config.wants("diagnostics"))
    for (const char* m : {"lambda_min", "max_ztg_norm", "lemma_ok"}) report.columns.emplace_back(m);

  ValidationSet validation;
  if (distances_wanted) {
    validation = validation_set(problem.get(), config.validation_size, threads);
    report.validation = validation.describe();
    if (validation.converged < validation.points.rows)
      report.warnings.push_back(std::to_string(validation.points.rows - validation.converged) +
                                " validation weights hit the step cap; their last iterates are kept");
  }

  const std::size_t per_setting = config.trials;
  const std::size_t jobs = config.samples.size() * per_setting;
  report.trials = run_pool<TrialResult>(jobs, threads, [&](std::size_t job) {
    TrialResult r;
    r.samples = config.samples[job / per_setting];
    r.trial = job % per_setting;
    r.seed = bmo_trial_seed(config.root_seed, r.trial);
    try {
      const bmo_solver_config s = solver_config(config, r.samples, r.seed, initial.get());
      bmo_run* raw = nullptr;
      check(bmo_solve(problem.get(), &s, &raw));
      RunHandle run(raw);
      r.wall_seconds = bmo_run_wall_seconds(run.get());
      bmo_model* m = nullptr;
      check(bmo_run_model(run.get(), &m));
      ModelHandle model(m);
      if (config.wants("mse")) {
        double v = 0.0;
        check(bmo_mse(model.get(), problem.get(), config.mse_samples, bmo_trial_seed(r.seed, kMseTag), &v));
        r.values["mse"] = v;
      }
      if (distances_wanted) {
        const Points X = sample_model_points(model.get(), config.model_samples, bmo_trial_seed(r.seed, kSampleTag));
        const auto [gd, igd] = distances(X, validation.points);
        if (config.wants("gd")) r.values["gd"] = gd;
        if (config.wants("igd")) r.values["igd"] = igd;
      }
      if (config.wants("diagnostics")) {
        char* text = nullptr;
        check(bmo_run_lemma_json(run.get(), &text));
        const nlohmann::json lemma = parse_owned(text);
        r.values["lambda_min"] = lemma.at("lambda_min_min").get<double>();
        r.values["max_ztg_norm"] = lemma.at("max_ztg_norm").get<double>();
        const bool ok = lemma.at("lambda_positive").get<bool>() && lemma.at("ztg_bound_holds").get<bool>() &&
                        lemma.at("basis_norm_bound_holds").get<bool>() &&
                        lemma.at("partition_of_unity_holds").get<bool>() && lemma.at("step_bound_holds").get<bool>();
        r.values["lemma_ok"] = ok ? 1.0 : 0.0;
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = error_text(e);
      r.values.clear();
    }
    return r;
  });

  for (std::size_t s = 0; s < config.samples.size(); ++s) {
    SettingAggregate agg;
    agg.samples = config.samples[s];
    agg.trials = per_setting;
    for (const auto& col : report.columns) {
      std::vector<double> values;
      for (std::size_t i = 0; i < per_setting; ++i) {
        const TrialResult& r = report.trials[s * per_setting + i];
        if (r.ok) values.push_back(r.values.at(col));
      }
      agg.metrics[col] = aggregate(values);
    }
    for (std::size_t i = 0; i < per_setting; ++i) {
      const TrialResult& r = report.trials[s * per_setting + i];
      if (!r.ok) {
        ++agg.failed;
        report.warnings.push_back("N=" + std::to_string(r.samples) + " trial " + std::to_string(r.trial) +
                                  " failed and is excluded: " + r.error);
      }
    }
    report.settings.push_back(std::move(agg));
  }
  return report;
}

std::string trials_csv(const ExperimentReport& report) {
  std::string out = "samples,trial,seed,status";
  for (const auto& c : report.columns) out += "," + c;
  out += ",error\n";
  for (const auto& r : report.trials) {
    out += std::to_string(r.samples) + "," + std::to_string(r.trial) + "," + std::to_string(r.seed) + ",";
    out += r.ok ? "ok" : "failed";
    for (const auto& c : report.columns) {
      out += ",";
      if (r.ok) out += format_double(r.values.at(c));
    }
    out += "," + (r.ok ? std::string() : csv_quote(r.error)) + "\n";
  }
  return out;
}

nlohmann::json aggregate_json(const ExperimentReport& report) {
  nlohmann::json doc = envelope(report.config);
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : report.settings) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, a] : s.metrics)
      metrics[name] = {{"mean", a.mean}, {"sd", a.sd}, {"count", a.count}, {"sd_degenerate", a.sd_degenerate}};
    settings.push_back({{"samples", s.samples}, {"trials", s.trials}, {"failed", s.failed}, {"metrics", metrics}});
  }
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& r : report.trials) {
    nlohmann::json t = {{"samples", r.samples}, {"trial", r.trial}, {"seed", r.seed}, {"ok", r.ok},
                        {"wall_seconds", r.wall_seconds}, {"values", r.values}};
    if (!r.ok) t["error"] = r.error;
    trials.push_back(std::move(t));
  }
  doc["settings"] = std::move(settings);
  doc["trials"] = std::move(trials);
  doc["validation"] = report.validation;
  doc["warnings"] = report.warnings;
  return doc;
}

BaselineOutput run_baseline(const ExperimentConfig& config) {
  config.validate();
  const std::size_t threads = resolve_threads(config.threads);
  ProblemHandle problem = make_problem(config.problem);
  const std::size_t M = bmo_problem_num_objectives(problem.get());
  const std::size_t L = bmo_problem_dimension(problem.get());
  if (config.population < 1) throw config_error("population must be at least 1");

  const SweepOutput sweep = lattice_sweep(problem.get(), config.population, threads);
  std::size_t needed = 0;
  check(bmo_control_point_count(M, config.degree, &needed));
  std::vector<double> ts, xs;
  nlohmann::json nonconverged = nlohmann::json::array();
  for (std::size_t i = 0; i < sweep.weights.rows; ++i) {
    if (!sweep.converged[i]) {
      nonconverged.push_back(i);
      continue;
    }
    ts.insert(ts.end(), sweep.weights.row(i), sweep.weights.row(i) + M);
    xs.insert(xs.end(), sweep.points.row(i), sweep.points.row(i) + L);
  }
  const std::size_t usable = ts.size() / M;
  if (usable < needed)
    throw HarnessError(kExitRuntime, "insufficient_points",
                       "baseline has " + std::to_string(usable) + " converged points but a degree-" +
                           std::to_string(config.degree) + " fit needs " + std::to_string(needed));

  bmo_model* m = nullptr;
  check(bmo_model_fit(M, config.degree, L, usable, ts.data(), xs.data(), &m));
  ModelHandle model(m);

  const std::string method = "scalarization sweep + least-squares fit (stand-in for NSGA-II)";
  nlohmann::json meta = envelope(config);
  meta["method"] = method;

  BaselineOutput out;
  out.model_json = model_json(model.get(), meta.dump());
  nlohmann::json metrics = nlohmann::json::object();
  if (config.wants("mse")) {
    double v = 0.0;
    check(bmo_mse(model.get(), problem.get(), config.mse_samples, bmo_trial_seed(config.root_seed, kMseTag), &v));
    metrics["mse"] = v;
  }
  if (config.wants("gd") || config.wants("igd")) {
    const ValidationSet validation = validation_set(problem.get(), config.validation_size, threads);
    const Points X = sample_model_points(model.get(), config.model_samples, bmo_trial_seed(config.root_seed, kSampleTag));
    const auto [gd, igd] = distances(X, validation.points);
    if (config.wants("gd")) metrics["gd"] = gd;
    if (config.wants("igd")) metrics["igd"] = igd;
    metrics["validation"] = validation.describe();
  }
  out.report = envelope(config);
  out.report["method"] = method;
  out.report["sweep"] = {{"population", config.population},
                         {"converged", usable},
                         {"nonconverged_indices", nonconverged},
                         {"control_points", needed}};
  out.report["baseline"] = metrics;
  if (config.compare) out.report["proposed"] = aggregate_json(run_experiment(config));
  return out;
}

std::string sample_csv(const std::string& text, std::size_t n, std::uint64_t seed) {
  ModelHandle model = load_model_json(text);
  const std::size_t M = bmo_model_num_objectives(model.get());
  const std::size_t L = bmo_model_dimension(model.get());
  Points ts(n, M), xs(n, L);
  check(bmo_model_sample(model.get(), n, seed, ts.data.data(), xs.data.data()));
  std::string out;
  for (std::size_t m = 0; m < M; ++m) out += (m ? ",t_" : "t_") + std::to_string(m + 1);
  for (std::size_t l = 0; l < L; ++l) out += ",x_" + std::to_string(l + 1);
  out += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < M; ++m) out += (m ? "," : "") + format_double(ts.row(i)[m]);
    for (std::size_t l = 0; l < L; ++l) out += "," + format_double(xs.row(i)[l]);
    out += "\n";
  }
  return out;
}

std::vector<std::vector<double>> read_points_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw config_error("points file is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  const auto header = split(line);
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i].rfind("x_", 0) == 0) use.push_back(i);
  if (use.empty())
    for (std::size_t i = 0; i < header.size(); ++i) use.push_back(i);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    std::vector<double> row;
    for (std::size_t i : use) {
      if (i >= cells.size()) throw config_error("points file line " + std::to_string(line_no) + " is short");
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0')
        throw config_error("points file line " + std::to_string(line_no) + ": '" + cells[i] + "' is not a number");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw config_error("points file has no rows");
  return rows;
}

nlohmann::json compute_metrics(const ExperimentConfig& config, const MetricsInput& input) {
  for (const auto& m : config.metrics)
    if (m != "mse" && m != "gd" && m != "igd") throw config_error("metric '" + m + "' is not available here");
  const std::size_t threads = resolve_threads(config.threads);
  ModelHandle model = input.model_json.empty() ? nullptr : load_model_json(input.model_json);
  ProblemHandle problem = input.problem.empty() ? nullptr : make_problem(input.problem);

  auto from_csv = [](const std::string& text) {
    std::size_t dim = 0;
    const auto rows = read_points_csv(text);
    Points p;
    p.data = flat_rows(rows, dim);
    p.rows = rows.size();
    p.cols = dim;
    return p;
  };

  std::vector<std::string> wanted = config.metrics;
  if (wanted.empty()) {
    const bool have_x = !input.x_csv.empty() || model;
    const bool have_y = !input.y_csv.empty() || problem;
    if (have_x && have_y) wanted = {"gd", "igd"};
    if (model && problem && bmo_problem_has_pareto_map(problem.get())) wanted.push_back("mse");
    if (wanted.empty()) throw config_error("nothing to compute: provide X and Y point sets, or a model and a problem");
  }

  nlohmann::json result = nlohmann::json::object();
  const bool distances_wanted =
      std::find(wanted.begin(), wanted.end(), "gd") != wanted.end() ||
      std::find(wanted.begin(), wanted.end(), "igd") != wanted.end();
  if (distances_wanted) {
    Points X, Y;
    if (!input.x_csv.empty()) X = from_csv(input.x_csv);
    else if (model) X = sample_model_points(model.get(), config.model_samples, config.root_seed);
    else throw config_error("gd/igd need X: --x points file or --model");
    if (!input.y_csv.empty()) Y = from_csv(input.y_csv);
    else if (problem) {
      ValidationSet v = validation_set(problem.get(), config.validation_size, threads);
      result["validation"] = v.describe();
      Y = std::move(v.points);
    } else throw config_error("gd/igd need Y: --y points file or --problem");
    const auto [gd, igd] = distances(X, Y);
    if (std::find(wanted.begin(), wanted.end(), "gd") != wanted.end()) result["gd"] = gd;
    if (std::find(wanted.begin(), wanted.end(), "igd") != wanted.end()) result["igd"] = igd;
    result["x_points"] = X.rows;
    result["y_points"] = Y.rows;
  }
  if (std::find(wanted.begin(), wanted.end(), "mse") != wanted.end()) {
    if (!model || !problem) throw config_error("mse needs --model and --problem");
    double v = 0.0;
    check(bmo_mse(model.get(), problem.get(), config.mse_samples, config.root_seed, &v));
    result["mse"] = v;
  }
  nlohmann::json doc = envelope(config);
  doc["metrics"] = result;
  return doc;
}

DiagnosticsOutput run_diagnostics(const ExperimentConfig& config) {
  config.validate();
  const std::size_t threads = resolve_threads(config.threads);
  ProblemHandle problem = make_problem(config.problem);
  ModelHandle initial = load_initial(config);
  DiagnosticsOutput out;
  out.report = envelope(config);
  out.report["mode"] = config.mode;
  nlohmann::json settings = nlohmann::json::array();

  if (config.mode == "perturb") {
    if (config.perturb_k < 1 || config.perturb_k > config.iterations)
      throw config_error("perturbed iteration k must lie in [1, K]");
    out.csv = "k,N,repeat,sup_gap,frob_gap,bound_value\n";
    for (std::size_t n : config.samples) {
      const bmo_solver_config s = solver_config(config, n, config.root_seed, initial.get());
      char* text = nullptr;
      check(bmo_perturbation_experiment(problem.get(), &s, config.perturb_k, config.repeats, threads, &text));
      const nlohmann::json reports = parse_owned(text);
      std::vector<double> sup, frob;
      bool bound_holds = true;
      for (const auto& r : reports) {
        out.csv += std::to_string(r.at("k").get<std::size_t>()) + "," + std::to_string(n) + "," +
                   std::to_string(r.at("repeat").get<std::size_t>()) + "," +
                   format_double(r.at("sup_gap").get<double>()) + "," + format_double(r.at("frob_gap").get<double>()) +
                   "," + format_double(r.at("bound_value").get<double>()) + "\n";
        sup.push_back(r.at("sup_gap").get<double>());
        frob.push_back(r.at("frob_gap").get<double>());
        bound_holds = bound_holds && r.at("bound_holds").get<bool>();
      }
      auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
      };
      settings.push_back({{"samples", n},
                          {"median_sup_gap", med(sup)},
                          {"median_frob_gap", med(frob)},
                          {"bound_holds", bound_holds},
                          {"reports", reports}});
    }
    out.report["test_grid_version"] = config.test_grid_version;
  } else if (config.mode == "gengap") {
    for (std::size_t n : config.samples) {
      const auto reports = run_pool<nlohmann::json>(config.trials, threads, [&](std::size_t i) {
        const bmo_solver_config s = solver_config(config, n, bmo_trial_seed(config.root_seed, i), initial.get());
        char* text = nullptr;
        check(bmo_generalization_gap(problem.get(), &s, config.holdout, &text));
        return parse_owned(text);
      });
      std::vector<double> gaps, abs_gaps;
      for (const auto& r : reports) {
        gaps.push_back(r.at("gap").get<double>());
        abs_gaps.push_back(std::abs(gaps.back()));
      }
      const MetricAggregate g = aggregate(gaps), a = aggregate(abs_gaps);
      settings.push_back({{"samples", n},
                          {"mean_gap", g.mean},
                          {"sd_gap", g.sd},
                          {"mean_abs_gap", a.mean},
                          {"sd_abs_gap", a.sd},
                          {"sd_degenerate", g.sd_degenerate},
                          {"reports", reports}});
    }
  } else {
    for (std::size_t n : config.samples) {
      const auto reports = run_pool<nlohmann::json>(config.trials, threads, [&](std::size_t i) {
        const bmo_solver_config s = solver_config(config, n, bmo_trial_seed(config.root_seed, i), initial.get());
        bmo_run* raw = nullptr;
        check(bmo_solve(problem.get(), &s, &raw));
        RunHandle run(raw);
        char* text = nullptr;
        check(bmo_run_lemma_json(run.get(), &text));
        nlohmann::json j = parse_owned(text);
        j["seed"] = s.seed;
        return j;
      });
      settings.push_back({{"samples", n}, {"reports", reports}});
    }
  }
  out.report["settings"] = std::move(settings);
  return out;
}

} // namespace harness
