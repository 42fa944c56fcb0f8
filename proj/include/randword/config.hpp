#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "randword/ergodic.hpp"
#include "randword/word_model.hpp"

namespace randword {

using json = nlohmann::json;

/// Task names accepted in the "task" field, in documentation order.
const std::vector<std::string>& task_names();
/// Tasks that draw random numbers and therefore need a seed.
bool task_is_stochastic(std::string_view task);

/// One step of a path into a JSON document: object key or array index.
using PathStep = std::variant<std::string, std::size_t>;

/// Line (1-based) where the value at `path` starts in `text`, or 0 when the
/// path does not resolve. `text` must be valid JSON.
std::size_t locate_line(std::string_view text, const std::vector<PathStep>& path);

/// Read-only view of a config node that knows where it sits, so that schema
/// violations can name the field and its line.
class ConfigNode {
 public:
  ConfigNode(const json& node, std::vector<PathStep> path, const std::string* text,
             const std::string* source);

  const json& raw() const { return *node_; }
  /// The same location viewing a different value (which must outlive the view).
  ConfigNode rebind(const json& value) const;
  std::string path_string() const;
  bool has(const std::string& key) const;
  ConfigNode operator[](const std::string& key) const;
  ConfigNode operator[](std::size_t index) const;
  std::size_t size() const;

  double number() const;
  double number(const std::string& key, double fallback) const;
  std::size_t count() const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::uint64_t seed() const;
  std::string string() const;
  std::vector<double> numbers() const;
  Word word() const;

  /// Rejects keys other than `allowed`.
  void only_keys(std::initializer_list<const char*> allowed) const;
  /// Throws ConfigError prefixed with source:line: path.
  [[noreturn]] void fail(const std::string& message) const;

 private:
  const json* node_;
  std::vector<PathStep> path_;
  const std::string* text_;
  const std::string* source_;
};

struct ExperimentConfig {
  std::string task;
  std::optional<std::uint64_t> seed;
  std::optional<WordModel> model;
  /// The parsed document with the effective seed written back.
  json document;
  std::string text;
  std::string source;

  ConfigNode root() const { return {document, {}, &text, &source}; }
  ConfigNode params() const;
  /// FNV-1a 64 of the canonical dump of `document`, as 16 hex digits.
  std::string hash() const;
  std::uint64_t require_seed() const;
};

/// Parses and validates. `seed_override` replaces the config seed.
ExperimentConfig parse_config_text(const std::string& text, const std::string& source,
                                   std::optional<std::uint64_t> seed_override = {});
ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<std::uint64_t> seed_override = {});

WordModel parse_model(const ConfigNode& node);
Cylinder parse_cylinder(const ConfigNode& node);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace randword
