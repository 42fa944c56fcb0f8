// Command-line front end: randword <task> --config <file> [--seed N] [--out DIR]

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "randword/config.hpp"
#include "randword/errors.hpp"
#include "randword/experiment.hpp"
#include "randword/word_model.hpp"

namespace {

int exit_code(const randword::Error& e) {
  if (dynamic_cast<const randword::ConfigError*>(&e)) return 2;
  if (dynamic_cast<const randword::NumericError*>(&e)) return 3;
  if (dynamic_cast<const randword::DataError*>(&e)) return 4;
  return 1;
}

const char* family(int code) {
  switch (code) {
    case 2: return "configuration error";
    case 3: return "numerical error";
    case 4: return "data error";
    default: return "error";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random word models: Lyapunov exponents, scattering, localization, renewal"};
  std::string task;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool list_examples = false;

  std::string tasks;
  for (const auto& t : randword::task_names()) tasks += (tasks.empty() ? "" : " | ") + t;
  app.add_option("task", task, "one of: " + tasks);
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--seed", seed, "root seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory (default: current)");
  app.add_flag("--list-examples", list_examples, "print the example model constructors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_examples) {
    for (const auto& [name, description] : randword::example_catalogue())
      std::cout << name << "\t" << description << "\n";
    return 0;
  }
  if (task.empty() || config_path.empty()) {
    std::cerr << "randword: need a task and --config (see --help)\n";
    return 2;
  }

  try {
    const auto cfg = randword::parse_config(config_path, seed);
    if (cfg.task != task)
      throw randword::ConfigError(config_path + ": task: config describes '" + cfg.task +
                                  "' but '" + task + "' was requested");
    const auto summary = randword::run_experiment(cfg, out_dir);
    std::cout << summary.line << "\n";
    for (const auto& f : summary.files) std::cout << "  wrote " << f.string() << "\n";
    return 0;
  } catch (const randword::Error& e) {
    const int code = exit_code(e);
    std::cerr << "randword: " << family(code) << ": " << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "randword: internal error: " << e.what() << "\n";
    return 1;
  }
}
