#include "randword/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "randword/errors.hpp"

namespace randword {

const Word& OmegaPoint::word(std::int64_t i) const {
  const auto idx = static_cast<std::int64_t>(origin) + i;
  if (idx < 0 || idx >= static_cast<std::int64_t>(words.size())) {
    std::ostringstream msg;
    msg << "word index " << i << " outside the sampled window";
    throw WindowError(msg.str());
  }
  return words[static_cast<std::size_t>(idx)];
}

void advance(OmegaPoint& pt) {
  if (pt.k < pt.zeroth().length()) {
    ++pt.k;
    return;
  }
  if (pt.right_margin() < 1) throw WindowError("shift_T: window exhausted on the right");
  ++pt.origin;
  pt.k = 1;
}

void retreat(OmegaPoint& pt) {
  if (pt.k > 1) {
    --pt.k;
    return;
  }
  if (pt.left_margin() < 1) throw WindowError("shift_T_inv: window exhausted on the left");
  --pt.origin;
  pt.k = pt.zeroth().length();
}

OmegaPoint shift_T(const OmegaPoint& pt) {
  OmegaPoint out = pt;
  advance(out);
  return out;
}

OmegaPoint shift_T_inv(const OmegaPoint& pt) {
  OmegaPoint out = pt;
  retreat(out);
  return out;
}

OmegaPoint sample_omega(const WordModel& model, std::size_t left_words, std::size_t right_words,
                        Rng& rng) {
  OmegaPoint pt;
  pt.words.reserve(left_words + right_words + 1);
  pt.words.resize(left_words);
  const std::size_t length = model.draw_biased_length(rng);
  pt.words.push_back(model.draw_with_length(length, rng));
  pt.origin = left_words;
  pt.k = 1 + static_cast<std::size_t>(rng.below(length));
  for (std::size_t i = 0; i < right_words; ++i) pt.words.push_back(model.draw(rng));
  for (std::size_t i = left_words; i-- > 0;) pt.words[i] = model.draw(rng);
  return pt;
}

bool Cylinder::contains(const OmegaPoint& pt) const {
  if (offset && pt.k != *offset) return false;
  if (zeroth_length && pt.zeroth().length() != *zeroth_length) return false;
  for (const auto& [index, words] : allowed) {
    const Word& w = pt.word(index);
    if (std::find(words.begin(), words.end(), w) == words.end()) return false;
  }
  return true;
}

std::int64_t Cylinder::min_index() const {
  return allowed.empty() ? 0 : std::min<std::int64_t>(0, allowed.begin()->first);
}

std::int64_t Cylinder::max_index() const {
  return allowed.empty() ? 0 : std::max<std::int64_t>(0, allowed.rbegin()->first);
}

double cylinder_probability(const WordModel& model, const Cylinder& cylinder) {
  if (!model.is_atomic())
    throw UnsupportedModeError("cylinder_probability: needs an atomic model");
  const auto support = model.support();
  auto listed = [](const std::vector<Word>& list, const Word& w) {
    return std::find(list.begin(), list.end(), w) != list.end();
  };

  double zeroth = 0.0;
  const auto zeroth_allowed = cylinder.allowed.find(0);
  for (const auto& atom : support) {
    const std::size_t len = atom.word.length();
    if (cylinder.zeroth_length && len != *cylinder.zeroth_length) continue;
    if (zeroth_allowed != cylinder.allowed.end() && !listed(zeroth_allowed->second, atom.word))
      continue;
    const double offsets =
        cylinder.offset ? (*cylinder.offset >= 1 && *cylinder.offset <= len ? 1.0 : 0.0)
                        : static_cast<double>(len);
    zeroth += atom.weight * offsets;
  }
  double p = zeroth / model.expected_length();

  for (const auto& [index, words] : cylinder.allowed) {
    if (index == 0) continue;
    double mass = 0.0;
    for (const auto& atom : support)
      if (listed(words, atom.word)) mass += atom.weight;
    p *= mass;
  }
  return p;
}

namespace {

void validate_weights(std::span<const double> weights) {
  if (weights.empty()) throw ConfigError("length weights must be nonempty");
  double sum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
      std::ostringstream msg;
      msg << "length weight nu_" << j + 1 << " must be nonnegative";
      throw ConfigError(msg.str());
    }
    sum += weights[j];
  }
  if (std::abs(sum - 1.0) > WordModel::kWeightTolerance * 1e3)
    throw ConfigError("length weights must sum to 1");
}

double mean_length(std::span<const double> weights) {
  double mean = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) mean += static_cast<double>(j + 1) * weights[j];
  return mean;
}

}  // namespace

std::size_t support_gcd(std::span<const double> weights) {
  std::size_t d = 0;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (weights[j] > 0.0) d = std::gcd(d, j + 1);
  return d == 0 ? 1 : d;
}

RenewalSequence renewal_sequence(std::span<const double> weights, std::size_t max_length) {
  validate_weights(weights);
  if (max_length < 1) throw ConfigError("renewal_sequence: L must be at least 1");
  RenewalSequence out;
  out.weights.assign(weights.begin(), weights.end());
  out.gcd = support_gcd(weights);
  out.values.assign(max_length + 1, 0.0);
  out.values[0] = 1.0;
  for (std::size_t ell = 1; ell <= max_length; ++ell) {
    double a = 0.0;
    for (std::size_t j = 1; j <= std::min(weights.size(), ell); ++j)
      a += weights[j - 1] * out.values[ell - j];
    out.values[ell] = a;
  }
  return out;
}

std::vector<double> series_divide(std::span<const double> a, std::span<const double> b,
                                  std::size_t n) {
  if (b.empty() || b[0] == 0.0) throw ConfigError("series_divide: leading denominator coefficient is zero");
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = i < a.size() ? a[i] : 0.0;
    for (std::size_t j = 1; j <= std::min(i, b.size() - 1); ++j) s -= b[j] * c[i - j];
    c[i] = s / b[0];
  }
  return c;
}

std::vector<double> generating_coefficients(std::span<const double> weights,
                                            std::size_t max_length) {
  validate_weights(weights);
  std::vector<double> p(weights.size() + 1, 0.0);
  std::copy(weights.begin(), weights.end(), p.begin() + 1);
  std::vector<double> q(p.size());
  q[0] = 1.0;
  for (std::size_t j = 1; j < p.size(); ++j) q[j] = -p[j];
  auto c = series_divide(p, q, max_length + 1);
  c[0] += 1.0;
  return c;
}

std::vector<double> rescale_weights(std::span<const double> weights) {
  validate_weights(weights);
  const std::size_t d = support_gcd(weights);
  std::vector<double> out;
  for (std::size_t j = d; j <= weights.size(); j += d) out.push_back(weights[j - 1]);
  return out;
}

double renewal_limit(std::span<const double> weights) {
  validate_weights(weights);
  return static_cast<double>(support_gcd(weights)) / mean_length(weights);
}

std::vector<double> cesaro_mean(std::span<const double> sequence) {
  if (sequence.empty()) throw ConfigError("cesaro_mean: empty sequence");
  std::vector<double> means(sequence.size());
  double sum = 0.0;
  for (std::size_t d = 0; d < sequence.size(); ++d) {
    sum += sequence[d];
    means[d] = sum / static_cast<double>(d + 1);
  }
  return means;
}

namespace {

double checked_probability(const WordModel& model, const Cylinder& c, const char* name) {
  const double p = cylinder_probability(model, c);
  if (!(p > 0.0)) {
    std::ostringstream msg;
    msg << "cylinder " << name << " has measure zero";
    throw ModelDegenerateError(msg.str());
  }
  return p;
}

std::size_t shard_size(std::size_t trials, std::size_t shard) {
  return trials / kTrialShards + (shard < trials % kTrialShards ? 1 : 0);
}

}  // namespace

MixingTable mixing_experiment(const WordModel& model, const Cylinder& a, const Cylinder& b,
                              std::size_t ell_min, std::size_t ell_max, std::size_t trials,
                              std::uint64_t seed, Execution exec) {
  if (trials < kMinTrials) throw ConfigError("mixing_experiment: need at least 10^4 trials");
  if (ell_max < ell_min) throw ConfigError("mixing_experiment: empty shift range");
  MixingTable table;
  table.trials = trials;
  table.prob_a = checked_probability(model, a, "A");
  table.prob_b = checked_probability(model, b, "B");

  // l shifts cross at most l word boundaries.
  const auto left = static_cast<std::size_t>(-std::min(a.min_index(), b.min_index())) + 1;
  const auto right = ell_max + static_cast<std::size_t>(std::max(a.max_index(), b.max_index())) + 1;
  const std::size_t span = ell_max - ell_min + 1;

  std::vector<std::vector<std::size_t>> hits(kTrialShards, std::vector<std::size_t>(span, 0));
  for_each_index(kTrialShards, exec, [&](std::size_t shard) {
    Rng rng(derive_seed(seed, {shard}));
    auto& counts = hits[shard];
    for (std::size_t t = 0; t < shard_size(trials, shard); ++t) {
      OmegaPoint pt = sample_omega(model, left, right, rng);
      if (!b.contains(pt)) continue;
      for (std::size_t ell = 0; ell <= ell_max; ++ell) {
        if (ell >= ell_min && a.contains(pt)) ++counts[ell - ell_min];
        if (ell < ell_max) advance(pt);
      }
    }
  });

  const double target = table.prob_a * table.prob_b;
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < span; ++i) {
    MixingRow row;
    row.ell = ell_min + i;
    for (const auto& shard : hits) row.hits += shard[i];
    row.empirical = static_cast<double>(row.hits) / n;
    row.target = target;
    row.std_error = std::sqrt(target * (1.0 - target) / n);
    table.rows.push_back(row);
  }
  return table;
}

PreservationReport check_measure_preserving(const WordModel& model, const Cylinder& cylinder,
                                            std::size_t trials, std::uint64_t seed,
                                            Execution exec) {
  if (trials < kMinTrials) throw ConfigError("check_measure_preserving: need at least 10^4 trials");
  PreservationReport report;
  report.trials = trials;
  report.probability = cylinder_probability(model, cylinder);
  const auto left = static_cast<std::size_t>(-cylinder.min_index()) + 1;
  const auto right = static_cast<std::size_t>(cylinder.max_index()) + 2;

  std::vector<std::size_t> hits(kTrialShards, 0);
  for_each_index(kTrialShards, exec, [&](std::size_t shard) {
    Rng rng(derive_seed(seed, {shard}));
    for (std::size_t t = 0; t < shard_size(trials, shard); ++t) {
      OmegaPoint pt = sample_omega(model, left, right, rng);
      advance(pt);
      if (cylinder.contains(pt)) ++hits[shard];
    }
  });
  const double n = static_cast<double>(trials);
  report.preimage = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::size_t{0})) / n;
  const double p = report.probability;
  report.std_error = std::sqrt(p * (1.0 - p) / n);
  const double diff = std::abs(report.preimage - p);
  report.within_3sigma = report.std_error > 0.0 ? diff <= 3.0 * report.std_error : diff == 0.0;
  return report;
}

}  // namespace randword
