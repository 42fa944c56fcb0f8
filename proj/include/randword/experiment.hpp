#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "randword/config.hpp"

namespace randword {

struct RunSummary {
  std::string line;
  std::vector<std::filesystem::path> files;
};

/// Runs the configured task and writes <task>.csv / <task>.json (plus
/// <task>_fits.csv and similar where a task has a second table) into
/// out_dir, which is created if needed. Every file starts with the config
/// hash and seed.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// printf("%.17g")
std::string format_number(double x);

}  // namespace randword
