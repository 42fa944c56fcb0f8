#include "randword/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "randword/errors.hpp"

namespace randword {

TransferMatrix2 site_matrix(double a, cplx z) { return {z - a, -1.0, 1.0, 0.0}; }
RealMatrix2 site_matrix(double a, double energy) { return {energy - a, -1.0, 1.0, 0.0}; }

TransferMatrix2 word_matrix(const Word& w, cplx z) {
  auto m = TransferMatrix2::identity();
  for (double v : w.values) m = site_matrix(v, z) * m;
  return m;
}

RealMatrix2 word_matrix(const Word& w, double energy) {
  auto m = RealMatrix2::identity();
  for (double v : w.values) m = site_matrix(v, energy) * m;
  return m;
}

bool LyapunovEstimate::is_zero() const { return std::abs(value) < std::max(1e-2, 3.0 * std_error); }

namespace {

/// Left-multiplies factors into a running product, tracking ln||product||
/// through periodic renormalization.
template <class T>
class GrowthAccumulator {
 public:
  explicit GrowthAccumulator(std::size_t period) : period_(std::max<std::size_t>(period, 1)) {}

  void push(const Mat2<T>& factor) {
    m_ = factor * m_;
    tick();
  }

  /// Left-multiplies by T(a, z) without forming the matrix.
  void push_site(double a, T z) {
    const T f = z - a;
    const T na = f * m_.a - m_.c;
    const T nb = f * m_.b - m_.d;
    m_.c = m_.a;
    m_.d = m_.b;
    m_.a = na;
    m_.b = nb;
    tick();
  }

  double log_norm() const { return log_acc_ + std::log(m_.norm()); }

 private:
  void tick() {
    if (++since_ < period_) return;
    const double n = m_.norm();
    log_acc_ += std::log(n);
    m_ *= T(1.0 / n);
    since_ = 0;
  }

  Mat2<T> m_ = Mat2<T>::identity();
  double log_acc_ = 0.0;
  std::size_t since_ = 0;
  std::size_t period_;
};

/// Runs `steps` factors through `step(acc)` in batches and returns the
/// batch-means estimate of the growth rate.
template <class T, class Step>
LyapunovEstimate batched_growth(std::size_t steps, const LyapunovOptions& options, Step&& step) {
  if (steps == 0) throw ConfigError("Lyapunov estimate needs at least one step");
  GrowthAccumulator<T> acc(options.renormalize_every);
  const std::size_t batches = std::clamp<std::size_t>(options.batches, 1, steps);
  std::vector<double> rates;
  rates.reserve(batches);
  double previous = 0.0;
  std::size_t done = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t end = (b + 1) * steps / batches;
    for (; done < end; ++done) step(acc);
    const double now = acc.log_norm();
    const std::size_t size = end - b * steps / batches;
    rates.push_back((now - previous) / static_cast<double>(size));
    previous = now;
  }
  LyapunovEstimate est;
  est.steps = steps;
  est.value = previous / static_cast<double>(steps);
  if (batches > 1) {
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double r : rates) var += (r - mean) * (r - mean);
    var /= static_cast<double>(batches - 1);
    est.std_error = std::sqrt(var / static_cast<double>(batches));
  }
  return est;
}

template <class T>
LyapunovEstimate gamma0_impl(const WordModel& model, T z, std::size_t n_words, std::uint64_t seed,
                             const LyapunovOptions& options) {
  Rng rng(seed);
  LyapunovEstimate est;
  if (model.is_atomic()) {
    std::vector<Mat2<T>> matrices;
    for (const auto& atom : model.atoms()) matrices.push_back(word_matrix(atom.word, z));
    est = batched_growth<T>(n_words, options,
                            [&](GrowthAccumulator<T>& acc) { acc.push(matrices[model.draw_atom(rng)]); });
  } else {
    est = batched_growth<T>(n_words, options,
                            [&](GrowthAccumulator<T>& acc) { acc.push(word_matrix(model.draw(rng), z)); });
  }
  est.kind = LyapunovKind::Word;
  return est;
}

template <class T>
LyapunovEstimate gamma_impl(const WordModel& model, T z, std::size_t n_sites, std::uint64_t seed,
                            const LyapunovOptions& options) {
  PotentialStream stream(model, seed);
  auto est = batched_growth<T>(n_sites, options,
                               [&](GrowthAccumulator<T>& acc) { acc.push_site(stream.next(), z); });
  est.kind = LyapunovKind::Site;
  return est;
}

}  // namespace

LyapunovEstimate estimate_gamma0(const WordModel& model, cplx z, std::size_t n_words,
                                 std::uint64_t seed, const LyapunovOptions& options) {
  auto est = z.imag() == 0.0 ? gamma0_impl<double>(model, z.real(), n_words, seed, options)
                             : gamma0_impl<cplx>(model, z, n_words, seed, options);
  est.energy = z;
  return est;
}

LyapunovEstimate estimate_gamma(const WordModel& model, cplx z, std::size_t n_sites,
                                std::uint64_t seed, const LyapunovOptions& options) {
  auto est = z.imag() == 0.0 ? gamma_impl<double>(model, z.real(), n_sites, seed, options)
                             : gamma_impl<cplx>(model, z, n_sites, seed, options);
  est.energy = z;
  return est;
}

IdentityReport verify_length_identity(const WordModel& model, cplx z, std::size_t site_budget,
                                      std::uint64_t seed) {
  IdentityReport report;
  report.expected_length = model.expected_length();
  const auto n_words = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(site_budget) / report.expected_length)));
  report.gamma0 = estimate_gamma0(model, z, n_words, derive_seed(seed, {0}));
  report.gamma = estimate_gamma(model, z, site_budget, derive_seed(seed, {1}));
  const double L = report.expected_length;
  report.discrepancy = std::abs(report.gamma0.value - L * report.gamma.value);
  report.combined_stderr = std::hypot(report.gamma0.std_error, L * report.gamma.std_error);
  report.ratio = report.gamma.value != 0.0 ? report.gamma0.value / report.gamma.value : 0.0;
  report.vacuous = report.gamma0.is_zero() && report.gamma.is_zero();
  report.pass = report.vacuous || report.discrepancy <= 3.0 * report.combined_stderr;
  return report;
}

std::vector<GammaCurvePoint> gamma_curve(const WordModel& model, std::span<const cplx> energies,
                                         std::size_t site_budget, std::uint64_t seed,
                                         Execution exec) {
  std::vector<GammaCurvePoint> out(energies.size());
  for_each_index(energies.size(), exec, [&](std::size_t i) {
    const auto rep = verify_length_identity(model, energies[i], site_budget, derive_seed(seed, {i}));
    out[i] = {energies[i], rep.gamma0, rep.gamma, rep.ratio};
  });
  return out;
}

std::vector<LyapunovEstimate> gamma_sweep(const WordModel& model, std::span<const double> energies,
                                          std::size_t n_sites, std::uint64_t seed,
                                          Execution exec) {
  std::vector<LyapunovEstimate> out(energies.size());
  for_each_index(energies.size(), exec, [&](std::size_t i) {
    out[i] = estimate_gamma(model, energies[i], n_sites, derive_seed(seed, {i}));
  });
  return out;
}

}  // namespace randword
