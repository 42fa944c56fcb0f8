#include "randword/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "randword/errors.hpp"

namespace randword {

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"lyapunov", "bands",    "scatter",  "exceptional",
                                                 "localize", "dynamics", "renewal", "mixing"};
  return names;
}

bool task_is_stochastic(std::string_view task) {
  return task == "lyapunov" || task == "localize" || task == "dynamics" || task == "mixing";
}

namespace {

// Minimal skimmer over already-validated JSON: enough to find where a value
// starts. Strings are skipped with escape handling; nothing is decoded
// except object keys, which are compared after unescaping by nlohmann.
class Skimmer {
 public:
  explicit Skimmer(std::string_view text) : text_(text) {}

  std::size_t find(const std::vector<PathStep>& path) {
    skip_space();
    for (const auto& step : path) {
      if (!descend(step)) return 0;
      skip_space();
    }
    return line_;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void bump() {
    if (pos_ < text_.size() && text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r'))
      bump();
  }

  std::string read_string() {
    const std::size_t start = pos_;
    bump();  // opening quote
    while (pos_ < text_.size() && peek() != '"') {
      if (peek() == '\\') bump();
      bump();
    }
    bump();
    try {
      return json::parse(text_.substr(start, pos_ - start)).get<std::string>();
    } catch (const json::exception&) {
      return {};
    }
  }

  void skip_value() {
    skip_space();
    const char c = peek();
    if (c == '"') {
      read_string();
    } else if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      bump();
      skip_space();
      if (peek() == close) {
        bump();
        return;
      }
      while (true) {
        skip_space();
        if (c == '{') {
          read_string();
          skip_space();
          bump();  // ':'
        }
        skip_value();
        skip_space();
        if (peek() == ',') {
          bump();
          continue;
        }
        bump();  // close
        return;
      }
    } else {
      while (pos_ < text_.size() && peek() != ',' && peek() != '}' && peek() != ']' &&
             peek() != ' ' && peek() != '\n' && peek() != '\r' && peek() != '\t')
        bump();
    }
  }

  bool descend(const PathStep& step) {
    if (const auto* key = std::get_if<std::string>(&step)) {
      if (peek() != '{') return false;
      bump();
      while (true) {
        skip_space();
        if (peek() != '"') return false;
        const std::string name = read_string();
        skip_space();
        bump();  // ':'
        skip_space();
        if (name == *key) return true;
        skip_value();
        skip_space();
        if (peek() != ',') return false;
        bump();
      }
    }
    const std::size_t index = std::get<std::size_t>(step);
    if (peek() != '[') return false;
    bump();
    for (std::size_t i = 0;; ++i) {
      skip_space();
      if (peek() == ']') return false;
      if (i == index) return true;
      skip_value();
      skip_space();
      if (peek() != ',') return false;
      bump();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string describe(const json& node) {
  switch (node.type()) {
    case json::value_t::null: return "null";
    case json::value_t::object: return "an object";
    case json::value_t::array: return "an array";
    case json::value_t::string: return "a string";
    case json::value_t::boolean: return "a boolean";
    default: return "a number";
  }
}

}  // namespace

std::size_t locate_line(std::string_view text, const std::vector<PathStep>& path) {
  return Skimmer(text).find(path);
}

ConfigNode::ConfigNode(const json& node, std::vector<PathStep> path, const std::string* text,
                       const std::string* source)
    : node_(&node), path_(std::move(path)), text_(text), source_(source) {}

std::string ConfigNode::path_string() const {
  std::string out;
  for (const auto& step : path_) {
    if (const auto* key = std::get_if<std::string>(&step)) {
      if (!out.empty()) out += '.';
      out += *key;
    } else {
      out += '[' + std::to_string(std::get<std::size_t>(step)) + ']';
    }
  }
  return out.empty() ? "<root>" : out;
}

void ConfigNode::fail(const std::string& message) const {
  std::ostringstream msg;
  if (source_) msg << *source_;
  // Missing keys have no line of their own; report the nearest enclosing one.
  std::vector<PathStep> probe = path_;
  std::size_t line = 0;
  while (text_) {
    line = locate_line(*text_, probe);
    if (line != 0 || probe.empty()) break;
    probe.pop_back();
  }
  if (line != 0) msg << ':' << line;
  msg << ": " << path_string() << ": " << message;
  throw ConfigError(msg.str());
}

ConfigNode ConfigNode::rebind(const json& value) const { return {value, path_, text_, source_}; }

bool ConfigNode::has(const std::string& key) const {
  return node_->is_object() && node_->contains(key);
}

ConfigNode ConfigNode::operator[](const std::string& key) const {
  auto path = path_;
  path.emplace_back(key);
  if (!node_->is_object()) fail("expected an object, found " + describe(*node_));
  if (!node_->contains(key)) ConfigNode(*node_, path, text_, source_).fail("missing required field");
  return ConfigNode(node_->at(key), std::move(path), text_, source_);
}

ConfigNode ConfigNode::operator[](std::size_t index) const {
  if (!node_->is_array()) fail("expected an array, found " + describe(*node_));
  auto path = path_;
  path.emplace_back(index);
  return ConfigNode(node_->at(index), std::move(path), text_, source_);
}

std::size_t ConfigNode::size() const {
  if (!node_->is_array()) fail("expected an array, found " + describe(*node_));
  return node_->size();
}

double ConfigNode::number() const {
  if (!node_->is_number()) fail("expected a number, found " + describe(*node_));
  const double v = node_->get<double>();
  if (!std::isfinite(v)) fail("must be finite");
  return v;
}

double ConfigNode::number(const std::string& key, double fallback) const {
  return has(key) ? (*this)[key].number() : fallback;
}

std::size_t ConfigNode::count() const {
  if (!node_->is_number_integer() || node_->get<std::int64_t>() < 0)
    fail("expected a nonnegative integer, found " + (node_->is_number() ? node_->dump() : describe(*node_)));
  return node_->get<std::size_t>();
}

std::size_t ConfigNode::count(const std::string& key, std::size_t fallback) const {
  return has(key) ? (*this)[key].count() : fallback;
}

std::uint64_t ConfigNode::seed() const {
  if (!node_->is_number_unsigned() && !(node_->is_number_integer() && node_->get<std::int64_t>() >= 0))
    fail("seed must be a nonnegative integer");
  return node_->get<std::uint64_t>();
}

std::string ConfigNode::string() const {
  if (!node_->is_string()) fail("expected a string, found " + describe(*node_));
  return node_->get<std::string>();
}

std::vector<double> ConfigNode::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].number());
  return out;
}

Word ConfigNode::word() const {
  auto values = numbers();
  if (values.empty()) fail("a word needs at least one value");
  return Word(std::move(values));
}

void ConfigNode::only_keys(std::initializer_list<const char*> allowed) const {
  if (!node_->is_object()) fail("expected an object, found " + describe(*node_));
  for (const auto& item : node_->items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      (*this)[item.key()].fail("unknown field (expected one of: " + list + ")");
    }
  }
}

namespace {

std::vector<double> parse_weights(const ConfigNode& node) {
  std::vector<double> w;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const double v = node[i].number();
    if (v < 0.0) node[i].fail("weight must be nonnegative");
    w.push_back(v);
  }
  return w;
}

// Model constructors report plain messages; attach the location of the model.
template <class F>
WordModel located(const ConfigNode& node, F&& build) {
  try {
    return build();
  } catch (const ConfigError& e) {
    node.fail(e.what());
  }
}

}  // namespace

WordModel parse_model(const ConfigNode& node) {
  if (node.has("atoms")) {
    node.only_keys({"atoms", "max_length", "bound"});
    const auto atoms_node = node["atoms"];
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < atoms_node.size(); ++i) {
      const auto a = atoms_node[i];
      a.only_keys({"word", "weight"});
      const double w = a["weight"].number();
      if (w < 0.0) a["weight"].fail("weight must be nonnegative");
      atoms.push_back({a["word"].word(), w});
    }
    std::optional<std::size_t> max_length;
    std::optional<double> bound;
    if (node.has("max_length")) max_length = node["max_length"].count();
    if (node.has("bound")) bound = node["bound"].number();
    return located(node, [&] { return WordModel::atomic(atoms, max_length, bound); });
  }

  // Two spellings: {"example": "dimer", "lambda": ...} and
  // {"example": {"kind": "dimer", "params": {"lambda": ...}}}.
  if (node["example"].raw().is_object()) {
    node.only_keys({"example"});
    const auto ex = node["example"];
    ex.only_keys({"kind", "params"});
    json flat = ex.has("params") ? ex["params"].raw() : json::object();
    if (!flat.is_object()) ex["params"].fail("expected an object");
    flat["example"] = ex["kind"].string();
    return parse_model((ex.has("params") ? ex["params"] : ex).rebind(flat));
  }
  const auto kind_node = node["example"];
  ExampleKind kind;
  try {
    kind = parse_example_kind(kind_node.string());
  } catch (const ConfigError& e) {
    kind_node.fail(e.what());
  }
  ExampleParams params;
  switch (kind) {
    case ExampleKind::Anderson:
      node.only_keys({"example", "values", "weights", "uniform"});
      if (node.has("uniform")) {
        const auto range = node["uniform"].numbers();
        if (range.size() != 2) node["uniform"].fail("expected [lo, hi]");
        params.uniform_range = std::make_pair(range[0], range[1]);
      } else {
        params.values = node["values"].numbers();
      }
      break;
    case ExampleKind::SingleSite:
      node.only_keys({"example", "base", "couplings", "weights"});
      params.base = node["base"].word();
      params.couplings = node["couplings"].numbers();
      break;
    case ExampleKind::Displacement:
      node.only_keys({"example", "profile", "block_length", "weights"});
      params.profile = node["profile"].word();
      params.block_length = node["block_length"].count();
      break;
    case ExampleKind::Dimer:
      node.only_keys({"example", "lambda", "p"});
      params.lambda = node["lambda"].number();
      params.p = node.number("p", 0.5);
      break;
    case ExampleKind::Polymer:
      node.only_keys({"example", "first", "second", "p"});
      params.first = node["first"].word();
      params.second = node["second"].word();
      params.p = node.number("p", 0.5);
      break;
  }
  if (node.has("weights")) params.weights = parse_weights(node["weights"]);
  return located(node, [&] { return make_example(kind, params); });
}

Cylinder parse_cylinder(const ConfigNode& node) {
  node.only_keys({"offset", "zeroth_length", "allowed"});
  Cylinder c;
  if (node.has("offset")) {
    c.offset = node["offset"].count();
    if (*c.offset < 1) node["offset"].fail("offsets are 1-based");
  }
  if (node.has("zeroth_length")) c.zeroth_length = node["zeroth_length"].count();
  if (node.has("allowed")) {
    const auto allowed = node["allowed"];
    if (!allowed.raw().is_object()) allowed.fail("expected an object keyed by word index");
    for (const auto& item : allowed.raw().items()) {
      const auto entry = allowed[item.key()];
      std::int64_t index = 0;
      try {
        std::size_t used = 0;
        index = std::stoll(item.key(), &used);
        if (used != item.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        entry.fail("keys must be integer word indices");
      }
      std::vector<Word> words;
      for (std::size_t i = 0; i < entry.size(); ++i) words.push_back(entry[i].word());
      c.allowed[index] = std::move(words);
    }
  }
  return c;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ConfigNode ExperimentConfig::params() const {
  const auto r = root();
  if (r.has("params")) return r["params"];
  static const json empty = json::object();
  return {empty, {"params"}, &text, &source};
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(document.dump())));
  return buf;
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw ConfigError(source + ": seed: task '" + task + "' is stochastic and needs a seed");
  return *seed;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source,
                                   std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  cfg.text = text;
  cfg.source = source;
  try {
    cfg.document = json::parse(text);
  } catch (const json::parse_error& e) {
    // The nlohmann message already carries "line L, column C".
    throw ConfigError(source + ": " + e.what());
  }
  const auto root = cfg.root();
  if (!cfg.document.is_object()) root.fail("the config must be a JSON object");
  root.only_keys({"task", "seed", "model", "params"});

  const auto task_node = root["task"];
  cfg.task = task_node.string();
  bool known = false;
  for (const auto& t : task_names()) known = known || t == cfg.task;
  if (!known) {
    std::string list;
    for (const auto& t : task_names()) list += (list.empty() ? "" : ", ") + t;
    task_node.fail("unknown task '" + cfg.task + "' (valid tasks: " + list + ")");
  }

  if (root.has("seed")) cfg.seed = root["seed"].seed();
  if (seed_override) {
    cfg.seed = seed_override;
    cfg.document["seed"] = *seed_override;
  }
  if (task_is_stochastic(cfg.task) && !cfg.seed)
    root.fail("task '" + cfg.task + "' is stochastic; a seed is required");

  if (cfg.task != "renewal") cfg.model = parse_model(root["model"]);
  else if (root.has("model")) cfg.model = parse_model(root["model"]);
  if (root.has("params") && !cfg.document["params"].is_object())
    root["params"].fail("expected an object");
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string(), seed_override);
}

}  // namespace randword
