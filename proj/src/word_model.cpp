#include "randword/word_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "randword/errors.hpp"

namespace randword {

double Word::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::ostream& operator<<(std::ostream& os, const Word& w) {
  os << '(';
  for (std::size_t i = 0; i < w.values.size(); ++i) os << (i ? ", " : "") << w.values[i];
  return os << ')';
}

Word concat_words(const Word& first, const Word& second) {
  Word out = first;
  out.values.insert(out.values.end(), second.values.begin(), second.values.end());
  return out;
}

Word scaled(const Word& w, double lambda) {
  Word out = w;
  for (auto& v : out.values) v *= lambda;
  return out;
}

bool words_do_not_commute(const Word& w0, const Word& w1) {
  return concat_words(w0, w1) != concat_words(w1, w0);
}

namespace {

std::size_t pick(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

void check_weights(const std::vector<double>& weights, const char* what) {
  if (weights.empty()) throw ConfigError(std::string(what) + ": no weights given");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      std::ostringstream msg;
      msg << what << "[" << i << "]: weight must be nonnegative, got " << weights[i];
      throw ConfigError(msg.str());
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > WordModel::kWeightTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": weights sum to " << total << ", expected 1 within "
        << WordModel::kWeightTolerance;
    throw ConfigError(msg.str());
  }
}

}  // namespace

WordModel WordModel::atomic(std::vector<Atom> atoms, std::optional<std::size_t> max_length,
                            std::optional<double> bound) {
  if (atoms.empty()) throw ConfigError("atoms: word model needs at least one atom");
  std::vector<double> weights;
  std::size_t longest = 0;
  double largest = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].word.length() == 0) {
      std::ostringstream msg;
      msg << "atoms[" << i << "].word: words must have length >= 1";
      throw ConfigError(msg.str());
    }
    for (double v : atoms[i].word.values)
      if (!std::isfinite(v)) throw ConfigError("atoms: non-finite potential value");
    weights.push_back(atoms[i].weight);
    longest = std::max(longest, atoms[i].word.length());
    largest = std::max(largest, atoms[i].word.max_abs());
  }
  check_weights(weights, "atoms.weight");

  WordModel model;
  model.max_length_ = max_length.value_or(longest);
  model.bound_ = bound.value_or(largest > 0.0 ? largest : 1.0);
  if (model.max_length_ < 1) throw ConfigError("max_length: must be positive");
  if (!(model.bound_ > 0.0)) throw ConfigError("bound: must be positive");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].word.length() > model.max_length_) {
      std::ostringstream msg;
      msg << "atoms[" << i << "].word: length " << atoms[i].word.length() << " exceeds max_length "
          << model.max_length_;
      throw ConfigError(msg.str());
    }
    if (atoms[i].word.max_abs() > model.bound_) {
      std::ostringstream msg;
      msg << "atoms[" << i << "].word: entry exceeds bound " << model.bound_;
      throw ConfigError(msg.str());
    }
  }

  model.atoms_ = std::move(atoms);
  model.length_weights_.assign(model.max_length_, 0.0);
  double running = 0.0;
  for (const auto& a : model.atoms_) {
    running += a.weight;
    model.cumulative_.push_back(running);
    model.length_weights_[a.word.length() - 1] += a.weight;
  }
  model.finish_length_law();
  return model;
}

WordModel WordModel::sampled(std::vector<double> length_weights, double bound, WordSampler sampler,
                             std::string tag) {
  check_weights(length_weights, "length_weights");
  if (!(bound > 0.0)) throw ConfigError("bound: must be positive");
  if (!sampler) throw ConfigError("sampler: missing");
  WordModel model;
  model.length_weights_ = std::move(length_weights);
  model.max_length_ = model.length_weights_.size();
  model.bound_ = bound;
  model.sampler_ = std::move(sampler);
  model.tag_ = std::move(tag);
  // In sampler mode cumulative_ runs over lengths instead of atoms.
  model.cumulative_.resize(model.length_weights_.size());
  std::partial_sum(model.length_weights_.begin(), model.length_weights_.end(),
                   model.cumulative_.begin());
  model.finish_length_law();
  return model;
}

void WordModel::finish_length_law() {
  expected_length_ = 0.0;
  biased_cumulative_.clear();
  double running = 0.0;
  for (std::size_t j = 1; j <= length_weights_.size(); ++j) {
    expected_length_ += static_cast<double>(j) * length_weights_[j - 1];
    running += static_cast<double>(j) * length_weights_[j - 1];
    biased_cumulative_.push_back(running);
  }
}

std::vector<Atom> WordModel::support() const {
  std::vector<Atom> out;
  for (const auto& a : atoms_)
    if (a.weight > 0.0) out.push_back(a);
  return out;
}

std::size_t WordModel::draw_atom(Rng& rng) const {
  if (!is_atomic()) throw UnsupportedModeError("draw_atom: model is sampler-backed");
  return pick(cumulative_, rng.uniform());
}

Word WordModel::draw(Rng& rng) const {
  if (is_atomic()) return atoms_[draw_atom(rng)].word;
  return sampler_(1 + pick(cumulative_, rng.uniform()), rng);
}

Word WordModel::draw_with_length(std::size_t length, Rng& rng) const {
  if (!is_atomic()) return sampler_(length, rng);
  double total = 0.0;
  for (const auto& a : atoms_)
    if (a.word.length() == length) total += a.weight;
  if (!(total > 0.0)) throw DataError("draw_with_length: no mass on the requested length");
  double u = rng.uniform() * total;
  const Atom* last = nullptr;
  for (const auto& a : atoms_) {
    if (a.word.length() != length || a.weight <= 0.0) continue;
    last = &a;
    if (u < a.weight) return a.word;
    u -= a.weight;
  }
  return last->word;
}

std::size_t WordModel::draw_biased_length(Rng& rng) const {
  return 1 + pick(biased_cumulative_, rng.uniform());
}

NcReport check_nc(const WordModel& model) {
  if (!model.is_atomic())
    throw UnsupportedModeError("check_nc: exact (NC) check needs an atomic word model");
  const auto support = model.support();
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      if (words_do_not_commute(support[i].word, support[j].word))
        return {true, std::make_pair(support[i].word, support[j].word)};
  return {false, std::nullopt};
}

PotentialWindow sample_potential(const WordModel& model, std::uint64_t seed, std::int64_t n_min,
                                 std::int64_t n_max) {
  if (n_max < n_min) throw ConfigError("sample_potential: empty window");
  Rng anchor_rng(derive_seed(seed, {0}));
  Rng right_rng(derive_seed(seed, {1}));
  Rng left_rng(derive_seed(seed, {2}));

  const std::size_t j = model.draw_biased_length(anchor_rng);
  const Word zeroth = model.draw_with_length(j, anchor_rng);
  const std::size_t k = 1 + anchor_rng.below(j);

  PotentialWindow win;
  win.n_min = n_min;
  win.n_max = n_max;
  win.anchor_offset = k;
  win.anchor_length = j;
  win.values.assign(static_cast<std::size_t>(n_max - n_min + 1), 0.0);

  auto place = [&](const Word& w, std::int64_t start) {
    for (std::size_t i = 0; i < w.length(); ++i) {
      const std::int64_t n = start + static_cast<std::int64_t>(i);
      if (n >= n_min && n <= n_max) win.values[static_cast<std::size_t>(n - n_min)] = w[i];
    }
  };

  const std::int64_t zeroth_start = 1 - static_cast<std::int64_t>(k);
  place(zeroth, zeroth_start);

  std::int64_t next = zeroth_start + static_cast<std::int64_t>(j);
  std::vector<std::int64_t> right_starts;
  while (next <= n_max) {
    const Word w = model.draw(right_rng);
    place(w, next);
    right_starts.push_back(next);
    next += static_cast<std::int64_t>(w.length());
  }
  std::vector<std::int64_t> left_starts;
  std::int64_t end = zeroth_start;  // one past the last site of the next left word
  while (end > n_min) {
    const Word w = model.draw(left_rng);
    const std::int64_t start = end - static_cast<std::int64_t>(w.length());
    place(w, start);
    left_starts.push_back(start);
    end = start;
  }

  std::reverse(left_starts.begin(), left_starts.end());
  std::vector<std::int64_t> starts = left_starts;
  starts.push_back(zeroth_start);
  starts.insert(starts.end(), right_starts.begin(), right_starts.end());
  // Keep only words overlapping the window.
  std::vector<std::int64_t> kept;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::int64_t last_site = (i + 1 < starts.size() ? starts[i + 1] : next) - 1;
    if (last_site >= n_min && starts[i] <= n_max) kept.push_back(starts[i]);
  }
  win.word_starts = std::move(kept);
  return win;
}

PotentialStream::PotentialStream(const WordModel& model, std::uint64_t seed)
    : model_(&model), right_(derive_seed(seed, {1})) {
  Rng anchor_rng(derive_seed(seed, {0}));
  anchor_length_ = model.draw_biased_length(anchor_rng);
  word_ = model.draw_with_length(anchor_length_, anchor_rng);
  anchor_offset_ = 1 + anchor_rng.below(anchor_length_);
  pos_ = anchor_offset_;  // site 1 is position k+1 of the zeroth word
}

double PotentialStream::next() {
  if (pos_ >= word_.length()) {
    word_ = model_->draw(right_);
    pos_ = 0;
  }
  return word_[pos_++];
}

std::string to_string(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::Anderson: return "anderson";
    case ExampleKind::SingleSite: return "single_site";
    case ExampleKind::Displacement: return "displacement";
    case ExampleKind::Dimer: return "dimer";
    case ExampleKind::Polymer: return "polymer";
  }
  return "unknown";
}

ExampleKind parse_example_kind(const std::string& name) {
  for (auto kind : {ExampleKind::Anderson, ExampleKind::SingleSite, ExampleKind::Displacement,
                    ExampleKind::Dimer, ExampleKind::Polymer})
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown example kind '" + name +
                    "' (expected anderson, single_site, displacement, dimer or polymer)");
}

std::vector<std::pair<std::string, std::string>> example_catalogue() {
  return {
      {"anderson", "i.i.d. single-site values: params {values, weights} or {uniform: [lo, hi]}"},
      {"single_site", "random couplings of a fixed word: params {base, couplings, weights}"},
      {"displacement", "profile f shifted inside blocks of length ell: params {profile, block_length, weights}"},
      {"dimer", "words (lambda, lambda) and (-lambda, -lambda): params {lambda, p}"},
      {"polymer", "two arbitrary words: params {first, second, p}"},
  };
}

namespace {

std::vector<double> uniform_or(std::vector<double> weights, std::size_t n, const char* what) {
  if (weights.empty()) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (weights.size() != n) {
    std::ostringstream msg;
    msg << what << ": expected " << n << " weights, got " << weights.size();
    throw ConfigError(msg.str());
  }
  return weights;
}

}  // namespace

WordModel anderson(std::vector<double> values, std::vector<double> weights) {
  if (values.empty()) throw ConfigError("anderson: values must be nonempty");
  weights = uniform_or(std::move(weights), values.size(), "anderson.weights");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < values.size(); ++i) atoms.push_back({Word{values[i]}, weights[i]});
  return WordModel::atomic(std::move(atoms), 1);
}

WordModel anderson_uniform(double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("anderson.uniform: need lo < hi");
  const double bound = std::max(std::abs(lo), std::abs(hi));
  std::ostringstream tag;
  tag << "uniform[" << lo << ", " << hi << "]";
  return WordModel::sampled(
      {1.0}, bound, [lo, hi](std::size_t, Rng& rng) { return Word{rng.uniform(lo, hi)}; },
      tag.str());
}

WordModel single_site(const Word& base, const std::vector<double>& couplings,
                      std::vector<double> weights) {
  if (base.length() == 0) throw ConfigError("single_site.base: must be nonempty");
  if (couplings.empty()) throw ConfigError("single_site.couplings: must be nonempty");
  weights = uniform_or(std::move(weights), couplings.size(), "single_site.weights");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < couplings.size(); ++i)
    atoms.push_back({scaled(base, couplings[i]), weights[i]});
  return WordModel::atomic(std::move(atoms));
}

WordModel displacement(const Word& profile, std::size_t block_length,
                       std::vector<double> weights) {
  const std::size_t m = profile.length();
  if (!(m > 0 && m < block_length))
    throw ConfigError("displacement: need 0 < |profile| < ell");
  const std::size_t shifts = block_length - m + 1;
  weights = uniform_or(std::move(weights), shifts, "displacement.weights");
  std::vector<Atom> atoms;
  for (std::size_t d = 0; d < shifts; ++d) {
    Word w(std::vector<double>(block_length, 0.0));
    for (std::size_t i = 0; i < m; ++i) w.values[d + i] = profile[i];
    atoms.push_back({std::move(w), weights[d]});
  }
  return WordModel::atomic(std::move(atoms));
}

WordModel dimer(double lambda, double p) {
  if (!(lambda > 0.0)) throw ConfigError("dimer.lambda: must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("dimer.p: must lie in (0, 1)");
  return WordModel::atomic({{Word{lambda, lambda}, p}, {Word{-lambda, -lambda}, 1.0 - p}});
}

WordModel polymer(const Word& first, const Word& second, double p) {
  if (first.length() == 0 || second.length() == 0)
    throw ConfigError("polymer: words must be nonempty");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("polymer.p: must lie in (0, 1)");
  return WordModel::atomic({{first, p}, {second, 1.0 - p}});
}

WordModel make_example(ExampleKind kind, const ExampleParams& params) {
  switch (kind) {
    case ExampleKind::Anderson:
      if (params.uniform_range)
        return anderson_uniform(params.uniform_range->first, params.uniform_range->second);
      return anderson(params.values, params.weights);
    case ExampleKind::SingleSite: return single_site(params.base, params.couplings, params.weights);
    case ExampleKind::Displacement:
      return displacement(params.profile, params.block_length, params.weights);
    case ExampleKind::Dimer: return dimer(params.lambda, params.p);
    case ExampleKind::Polymer: return polymer(params.first, params.second, params.p);
  }
  throw ConfigError("make_example: unknown kind");
}

}  // namespace randword
