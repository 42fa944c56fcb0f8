#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "randword/rng.hpp"

namespace randword {

/// A finite block of lattice potential values.
struct Word {
  std::vector<double> values;

  Word() = default;
  Word(std::initializer_list<double> v) : values(v) {}
  explicit Word(std::vector<double> v) : values(std::move(v)) {}

  std::size_t length() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double max_abs() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Word& w);
};

Word concat_words(const Word& first, const Word& second);

/// lambda * w
Word scaled(const Word& w, double lambda);

struct Atom {
  Word word;
  double weight = 0.0;
};

/// Draws a word of the requested length for sampler-backed (non-atomic) models.
using WordSampler = std::function<Word(std::size_t length, Rng& rng)>;

/// Probability measure on words of length 1..max_length with entries in
/// [-bound, bound]. Either atomic (a finite weighted word list) or
/// sampler-backed, in which case only the length law is known exactly.
class WordModel {
 public:
  static constexpr double kWeightTolerance = 1e-12;

  /// Validates and stores an atomic model. max_length/bound default to the
  /// smallest values admitting every atom.
  static WordModel atomic(std::vector<Atom> atoms, std::optional<std::size_t> max_length = {},
                          std::optional<double> bound = {});

  /// length_weights[j-1] = nu(W_j). The sampler must return words of the
  /// requested length with entries bounded by `bound`.
  static WordModel sampled(std::vector<double> length_weights, double bound, WordSampler sampler,
                           std::string tag);

  bool is_atomic() const { return !sampler_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  /// Atoms with positive weight.
  std::vector<Atom> support() const;
  std::size_t max_length() const { return max_length_; }
  double bound() const { return bound_; }
  const std::string& sampler_tag() const { return tag_; }

  /// nu(W_j) for j = 1..max_length (index j-1).
  const std::vector<double>& length_weights() const { return length_weights_; }
  double expected_length() const { return expected_length_; }

  /// One independent nu-draw.
  Word draw(Rng& rng) const;
  /// Index of an atom drawn with probability proportional to its weight.
  std::size_t draw_atom(Rng& rng) const;
  /// Draw conditioned on |w| = length.
  Word draw_with_length(std::size_t length, Rng& rng) const;
  /// Length drawn from the size-biased law j * nu_j / <L>.
  std::size_t draw_biased_length(Rng& rng) const;

 private:
  WordModel() = default;
  void finish_length_law();

  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  std::vector<double> length_weights_;
  std::vector<double> biased_cumulative_;
  std::size_t max_length_ = 0;
  double bound_ = 0.0;
  double expected_length_ = 0.0;
  WordSampler sampler_;
  std::string tag_;
};

struct NcReport {
  bool holds = false;
  std::optional<std::pair<Word, Word>> witness;
};

/// Searches the support for a non-commuting pair. Throws UnsupportedModeError
/// for sampler-backed models.
NcReport check_nc(const WordModel& model);

/// True when w0 w1 != w1 w0.
bool words_do_not_commute(const Word& w0, const Word& w1);

inline double expected_length(const WordModel& model) { return model.expected_length(); }

/// Finite realization of V_{(omega,k)} on [n_min, n_max]. The origin n = 0 sits
/// at position `anchor_offset` (1-based) inside the zeroth word.
struct PotentialWindow {
  std::int64_t n_min = 0;
  std::int64_t n_max = -1;
  std::vector<double> values;
  std::size_t anchor_offset = 1;
  std::size_t anchor_length = 1;
  /// Absolute index of the first site of every word overlapping the window,
  /// ascending. The zeroth word starts at 1 - anchor_offset.
  std::vector<std::int64_t> word_starts;

  double at(std::int64_t n) const { return values.at(static_cast<std::size_t>(n - n_min)); }
  std::size_t size() const { return values.size(); }
};

/// Samples (omega, k) from P and realizes the potential on [n_min, n_max].
/// The zeroth word, words to the right and words to the left use three
/// derived streams, so sites n >= 1 do not depend on n_min.
PotentialWindow sample_potential(const WordModel& model, std::uint64_t seed, std::int64_t n_min,
                                 std::int64_t n_max);

/// Streams V(1), V(2), ... of a P-sampled path; same stream layout as
/// sample_potential.
class PotentialStream {
 public:
  PotentialStream(const WordModel& model, std::uint64_t seed);
  double next();
  std::size_t anchor_offset() const { return anchor_offset_; }
  std::size_t anchor_length() const { return anchor_length_; }

 private:
  const WordModel* model_;
  Rng right_;
  Word word_;
  std::size_t pos_ = 0;
  std::size_t anchor_offset_ = 1;
  std::size_t anchor_length_ = 1;
};

enum class ExampleKind { Anderson, SingleSite, Displacement, Dimer, Polymer };

std::string to_string(ExampleKind kind);
ExampleKind parse_example_kind(const std::string& name);
/// Names of the five constructors with one-line descriptions.
std::vector<std::pair<std::string, std::string>> example_catalogue();

/// Parameters of the example constructors; each kind reads its own subset.
struct ExampleParams {
  // anderson: atomic values/weights, or uniform_range for a continuous law
  std::vector<double> values;
  std::optional<std::pair<double, double>> uniform_range;
  // single_site: base word scaled by each coupling
  Word base;
  std::vector<double> couplings;
  // displacement: profile f and block length ell
  Word profile;
  std::size_t block_length = 0;
  // dimer
  double lambda = 0.0;
  double p = 0.5;
  // polymer
  Word first;
  Word second;
  /// Optional explicit weights (anderson, single_site, displacement); uniform otherwise.
  std::vector<double> weights;
};

WordModel make_example(ExampleKind kind, const ExampleParams& params);

WordModel anderson(std::vector<double> values, std::vector<double> weights = {});
WordModel anderson_uniform(double lo, double hi);
WordModel single_site(const Word& base, const std::vector<double>& couplings,
                      std::vector<double> weights = {});
WordModel displacement(const Word& profile, std::size_t block_length,
                       std::vector<double> weights = {});
WordModel dimer(double lambda, double p = 0.5);
WordModel polymer(const Word& first, const Word& second, double p = 0.5);

}  // namespace randword
