#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "randword/parallel.hpp"
#include "randword/rng.hpp"
#include "randword/word_model.hpp"

namespace randword {

/// A point (omega, k) of the suspension, kept as a finite window of words
/// around the zeroth one. words[origin] is omega_0 and k is 1-based inside it.
struct OmegaPoint {
  std::vector<Word> words;
  std::size_t origin = 0;
  std::size_t k = 1;

  const Word& zeroth() const { return words[origin]; }
  /// omega_i relative to the zeroth word; throws WindowError outside the window.
  const Word& word(std::int64_t i) const;
  std::size_t left_margin() const { return origin; }
  std::size_t right_margin() const { return words.size() - origin - 1; }
};

/// In-place shift by one site. Throws WindowError when the next (previous)
/// word is needed but lies outside the window.
void advance(OmegaPoint& pt);
void retreat(OmegaPoint& pt);

OmegaPoint shift_T(const OmegaPoint& pt);
OmegaPoint shift_T_inv(const OmegaPoint& pt);

/// Draws (omega, k) from the invariant measure: omega_0 from the size-biased
/// length law, k uniform in 1..|omega_0|, all other words independent.
OmegaPoint sample_omega(const WordModel& model, std::size_t left_words, std::size_t right_words,
                        Rng& rng);

/// A cylinder A x {k}: constraints on finitely many words near the origin.
/// An empty optional means "any".
struct Cylinder {
  std::optional<std::size_t> offset;
  std::optional<std::size_t> zeroth_length;
  /// Word index (relative to omega_0) -> allowed words at that index.
  std::map<std::int64_t, std::vector<Word>> allowed;

  bool contains(const OmegaPoint& pt) const;
  std::int64_t min_index() const;
  std::int64_t max_index() const;
};

/// Exact measure of the cylinder under an atomic model. Throws
/// UnsupportedModeError otherwise.
double cylinder_probability(const WordModel& model, const Cylinder& cylinder);

struct RenewalSequence {
  std::vector<double> values;   // A_0..A_L
  std::vector<double> weights;  // nu_1..nu_m
  std::size_t gcd = 1;
};

/// A_0 = 1 and A_l = sum_j nu_j A_{l-j}. Weights must be nonnegative and sum
/// to one.
RenewalSequence renewal_sequence(std::span<const double> weights, std::size_t max_length);

/// Taylor coefficients 0..max_length of 1 + P(z) / (1 - P(z)) with
/// P(z) = sum_j nu_j z^j, by power-series division.
std::vector<double> generating_coefficients(std::span<const double> weights,
                                            std::size_t max_length);

/// c = a / b truncated after n coefficients; b[0] must be nonzero.
std::vector<double> series_divide(std::span<const double> a, std::span<const double> b,
                                  std::size_t n);

/// gcd of the lengths j with nu_j > 0.
std::size_t support_gcd(std::span<const double> weights);
/// nu~_i = nu_{iD} for the support gcd D.
std::vector<double> rescale_weights(std::span<const double> weights);
/// lim A_{lD} = D / <L>.
double renewal_limit(std::span<const double> weights);

/// means[d-1] = (x_1 + ... + x_d) / d.
std::vector<double> cesaro_mean(std::span<const double> sequence);

struct MixingRow {
  std::size_t ell = 0;
  double empirical = 0.0;
  double target = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
};

struct MixingTable {
  std::size_t trials = 0;
  double prob_a = 0.0;
  double prob_b = 0.0;
  std::vector<MixingRow> rows;
};

/// Shards trials over this many independent streams; fixed so that results do
/// not depend on the thread count.
inline constexpr std::size_t kTrialShards = 64;
inline constexpr std::size_t kMinTrials = 10000;

/// Frequencies of {x in B, T^l x in A} for l in [ell_min, ell_max] against
/// P(A) P(B) with binomial errors sqrt(t (1 - t) / trials). Throws
/// ModelDegenerateError when a cylinder has measure zero.
MixingTable mixing_experiment(const WordModel& model, const Cylinder& a, const Cylinder& b,
                              std::size_t ell_min, std::size_t ell_max, std::size_t trials,
                              std::uint64_t seed, Execution exec = Execution::Parallel);

struct PreservationReport {
  double preimage = 0.0;  // empirical P(T^{-1} M)
  double probability = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  bool within_3sigma = false;
};

PreservationReport check_measure_preserving(const WordModel& model, const Cylinder& cylinder,
                                            std::size_t trials, std::uint64_t seed,
                                            Execution exec = Execution::Parallel);

}  // namespace randword
