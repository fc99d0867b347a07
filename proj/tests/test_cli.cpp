#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "bmo-cli-tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI in the scratch directory; stdout and stderr are captured together.
Result run(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" BMO_CLI_PATH "' " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& name) {
  std::ifstream in(workdir() / name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("solve writes model and trace, reproducibly") {
  const std::string args = "solve --problem scaled-med --n 30 --k 1000 --degree 3 --seed 1 --out model.json";
  REQUIRE(run(args).code == 0);
  CHECK(fs::exists(workdir() / "model.json"));
  CHECK(fs::exists(workdir() / "model.trace.json"));
  const std::string first = slurp("model.json");
  REQUIRE(run(args).code == 0);
  CHECK(slurp("model.json") == first);
  const auto doc = nlohmann::json::parse(first);
  CHECK(doc.at("M") == 3);
  CHECK(doc.at("meta").at("config").at("samples")[0] == 30);
}

TEST_CASE("too few samples is a configuration error") {
  const auto r = run("solve --n 5 --degree 3 --out bad.json");
  CHECK(r.code == 2);
  CHECK(r.out.find("N >= 10") != std::string::npos);
  const auto err = nlohmann::json::parse(r.out);
  CHECK(err.at("error").at("exit_code") == 2);
}

TEST_CASE("config file with flag overrides") {
  std::ofstream(workdir() / "cfg.json") << R"({"problem":"scaled-med","samples":[30],"iterations":20,"trials":2,"root_seed":4})";
  REQUIRE(run("experiment --config cfg.json --trials 3 --mse-samples 500 --csv t.csv --json agg.json").code == 0);
  const auto agg = nlohmann::json::parse(slurp("agg.json"));
  CHECK(agg.at("config").at("trials") == 3);
  CHECK(agg.at("config").at("iterations") == 20);
  CHECK(agg.at("settings")[0].at("metrics").at("mse").at("count") == 3);
  std::ofstream(workdir() / "typo.json") << R"({"iteratons":20})";
  CHECK(run("experiment --config typo.json").code == 2);
}

TEST_CASE("sample and metrics subcommands") {
  REQUIRE(run("solve --k 50 --seed 2 --out m.json").code == 0);
  REQUIRE(run("sample --model m.json --n 3 --seed 5 --out s.csv").code == 0);
  const std::string csv = slurp("s.csv");
  CHECK(csv.rfind("t_1,t_2,t_3,x_1,x_2,x_3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  REQUIRE(run("metrics --x s.csv --y s.csv --json d.json").code == 0);
  const auto d = nlohmann::json::parse(slurp("d.json"));
  CHECK(d.at("metrics").at("gd") == 0.0);
  CHECK(d.at("metrics").at("igd") == 0.0);
  REQUIRE(run("metrics --model m.json --problem scaled-med --metrics mse --json e.json").code == 0);
  CHECK(nlohmann::json::parse(slurp("e.json")).at("metrics").at("mse") > 0.0);
  std::ofstream(workdir() / "broken.json") << R"({"M":3,"D":3,"L":3,"index_order":[],"control_points":[]})";
  CHECK(run("sample --model broken.json --n 3").code == 2);
}

TEST_CASE("baseline exit codes") {
  CHECK(run("baseline --population 9 --no-compare --out b.json --json br.json").code == 3);
  REQUIRE(run("baseline --population 30 --no-compare --out b.json --json br.json").code == 0);
  CHECK(nlohmann::json::parse(slurp("br.json")).at("baseline").at("mse") > 0.0);
}

TEST_CASE("diagnostics subcommand") {
  REQUIRE(run("diagnostics --mode perturb --iterations 20 --k 10 --repeats 2 --out p.csv").code == 0);
  CHECK(slurp("p.csv").rfind("k,N,repeat,sup_gap,frob_gap,bound_value\n", 0) == 0);
  REQUIRE(run("diagnostics --mode gengap --iterations 20 --holdout 500 --json g.json").code == 0);
  CHECK(nlohmann::json::parse(slurp("g.json")).at("mode") == "gengap");
  CHECK(run("diagnostics --mode nonsense").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("thread override from the environment") {
  REQUIRE(run("experiment --k 10 --trials 2 --mse-samples 100 --csv a.csv --json a.json").code == 0);
  const std::string cmd = "BEZIER_MOPT_THREADS=1 ";
  const std::string full = "cd '" + workdir().string() + "' && " + cmd + "'" BMO_CLI_PATH
                           "' experiment --k 10 --trials 2 --mse-samples 100 --csv b.csv --json b.json";
  REQUIRE(std::system(full.c_str()) == 0);
  CHECK(slurp("a.csv") == slurp("b.csv"));
}
