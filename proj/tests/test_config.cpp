#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "randword/config.hpp"
#include "randword/errors.hpp"
#include "randword/experiment.hpp"

using namespace randword;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("randword_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RANDWORD_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const char* kDimerLyapunov = R"({
  "task": "lyapunov",
  "seed": 5,
  "model": {"example": "dimer", "lambda": 1.5},
  "params": {"energies": [0.0, 0.7], "sites": 2000}
})";

}  // namespace

TEST_CASE("minimal configs parse") {
  const auto cfg = parse_config_text(kDimerLyapunov, "cfg.json");
  CHECK(cfg.task == "lyapunov");
  CHECK(cfg.seed == 5u);
  REQUIRE(cfg.model);
  CHECK(cfg.model->expected_length() == doctest::Approx(2.0));
  CHECK(cfg.hash().size() == 16);

  const auto nested = parse_config_text(
      R"({"task": "bands", "model": {"example": {"kind": "dimer", "params": {"lambda": 1.5}}}})", "n.json");
  CHECK(nested.model->support().size() == cfg.model->support().size());
  CHECK_FALSE(nested.seed);

  const auto renewal = parse_config_text(R"({"task": "renewal", "params": {"weights": [1]}})", "r.json");
  CHECK_FALSE(renewal.model);
}

TEST_CASE("seed override is part of the hash") {
  const auto a = parse_config_text(kDimerLyapunov, "cfg.json");
  const auto b = parse_config_text(kDimerLyapunov, "cfg.json", 6);
  CHECK(b.seed == 6u);
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == parse_config_text(kDimerLyapunov, "other.json").hash());
}

TEST_CASE("schema violations name the field and line") {
  SUBCASE("negative weight") {
    const auto msg = error_of(R"({
  "task": "bands",
  "model": {"atoms": [
    {"word": [1.0], "weight": 0.5},
    {"word": [2.0], "weight": -0.5}
  ]}
})");
    CHECK(msg.find("cfg.json:5") != std::string::npos);
    CHECK(msg.find("model.atoms[1].weight") != std::string::npos);
    CHECK(msg.find("nonnegative") != std::string::npos);
  }
  SUBCASE("unknown task lists the valid ones") {
    const auto msg = error_of(R"({"task": "spectra", "model": {"example": "dimer", "lambda": 1}})");
    CHECK(msg.find("unknown task 'spectra'") != std::string::npos);
    for (const auto& t : task_names()) CHECK(msg.find(t) != std::string::npos);
  }
  SUBCASE("stochastic task without a seed") {
    const auto msg = error_of(R"({"task": "mixing", "model": {"example": "dimer", "lambda": 1}})");
    CHECK(msg.find("seed") != std::string::npos);
  }
  SUBCASE("unknown field") {
    const auto msg = error_of(R"({"task": "bands", "modle": {}})");
    CHECK(msg.find("modle") != std::string::npos);
  }
  SUBCASE("missing model") {
    CHECK(error_of(R"({"task": "bands"})").find("model") != std::string::npos);
  }
  SUBCASE("weights that do not sum to one") {
    const auto msg = error_of(R"({"task": "bands",
  "model": {"atoms": [{"word": [1.0], "weight": 0.5}, {"word": [2.0], "weight": 0.2}]}})");
    CHECK(msg.find("cfg.json:2") != std::string::npos);
  }
  SUBCASE("malformed JSON") {
    CHECK(error_of("{\"task\": ").find("cfg.json") != std::string::npos);
  }
}

TEST_CASE("renewal task writes A_60 close to 2/3") {
  const auto dir = scratch("renewal");
  const auto cfg = parse_config_text(R"({"task": "renewal", "params": {"weights": [0.5, 0.5], "L": 60}})", "r.json");
  run_experiment(cfg, dir);
  std::istringstream csv(slurp(dir / "renewal.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# config_hash=" + cfg.hash() + " seed=none", 0) == 0);
  std::getline(csv, line);
  CHECK(line == "ell,A,series,cesaro");
  std::string last;
  while (std::getline(csv, line)) last = line;
  REQUIRE(last.rfind("60,", 0) == 0);
  const double a60 = std::stod(last.substr(3));
  CHECK(std::abs(a60 - 2.0 / 3.0) < 1e-6);
}

TEST_CASE("exceptional task reports energies near +-lambda") {
  const auto dir = scratch("exceptional");
  const auto cfg = parse_config_text(
      R"({"task": "exceptional", "model": {"example": "dimer", "lambda": 0.5}})", "e.json");
  run_experiment(cfg, dir);
  const auto doc = json::parse(slurp(dir / "exceptional.json"));
  CHECK(doc["config_hash"] == cfg.hash());
  CHECK(doc["task"] == "exceptional");
  bool plus = false, minus = false;
  for (double e : doc["result"]["energies"].get<std::vector<double>>()) {
    plus = plus || std::abs(e - 0.5) < 1e-3;
    minus = minus || std::abs(e + 0.5) < 1e-3;
  }
  CHECK(plus);
  CHECK(minus);
}

TEST_CASE("identical config and seed give byte-identical files") {
  const char* mixing = R"({"task": "mixing", "seed": 9,
    "model": {"atoms": [{"word": [1.0], "weight": 0.5}, {"word": [-1.0, -1.0], "weight": 0.5}]},
    "params": {"A": {"allowed": {"0": [[1.0]]}}, "ell_min": 1, "ell_max": 8, "trials": 10000}})";
  for (const char* text : {kDimerLyapunov, mixing}) {
    const auto cfg = parse_config_text(text, "d.json");
    const auto first = run_experiment(cfg, scratch("det_a"));
    const auto second = run_experiment(cfg, scratch("det_b"));
    REQUIRE(first.files.size() == second.files.size());
    for (std::size_t i = 0; i < first.files.size(); ++i) {
      const auto a = slurp(first.files[i]);
      CHECK(!a.empty());
      CHECK(a == slurp(second.files[i]));
      CHECK(a.find(cfg.hash()) != std::string::npos);
    }
  }
  const auto other = run_experiment(parse_config_text(kDimerLyapunov, "d.json", 77), scratch("det_c"));
  CHECK(slurp(other.files[0]) != slurp(scratch("det_a") / "lyapunov.csv"));
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  const auto good = write_file(dir, "good.json", kDimerLyapunov);
  const auto out = (dir / "out").string();
  CHECK(run_cli("lyapunov --config " + good.string() + " --out " + out) == 0);
  CHECK(fs::exists(dir / "out" / "lyapunov.csv"));
  CHECK(run_cli("--list-examples") == 0);

  // Schema problems and usage errors.
  const auto bad = write_file(dir, "bad.json", R"({"task": "lyapunov", "seed": -1, "model": {"example": "dimer", "lambda": 1}})");
  CHECK(run_cli("lyapunov --config " + bad.string() + " --out " + out) == 2);
  CHECK(run_cli("bands --config " + good.string() + " --out " + out) == 2);
  CHECK(run_cli("lyapunov --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("lyapunov") == 2);
  CHECK(run_cli("--bogus-flag") == 2);

  // A dynamics window with no eigenvalues in it is a data error.
  const auto empty = write_file(dir, "empty.json", R"({"task": "dynamics", "seed": 1,
    "model": {"example": "dimer", "lambda": 0.5},
    "params": {"box": 200, "lower": 10.0, "upper": 11.0}})");
  CHECK(run_cli("dynamics --config " + empty.string() + " --out " + out) == 4);

  // A wave packet that reaches the edge of a small box: numeric error.
  const auto small = write_file(dir, "small.json", R"({"task": "dynamics", "seed": 1,
    "model": {"example": "dimer", "lambda": 0.5},
    "params": {"box": 100, "lower": -2.5, "upper": 2.5, "t_max": 2000, "realizations": 2}})");
  CHECK(run_cli("dynamics --config " + small.string() + " --out " + out) == 3);
}

TEST_CASE("shipped configs parse") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(RANDWORD_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto cfg = parse_config(entry.path());
    CHECK(entry.path().filename().string().rfind(cfg.task + "_", 0) == 0);
    ++seen;
  }
  CHECK(seen == task_names().size());
}
