#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "randword/parallel.hpp"
#include "randword/tridiagonal.hpp"
#include "randword/word_model.hpp"

namespace randword {

/// Dirichlet restriction of H = Delta + V to sites 1..N.
struct FiniteBox {
  std::vector<double> potential;  // V(1..N)

  static FiniteBox sample(const WordModel& model, std::size_t n, std::uint64_t seed);
  static FiniteBox free(std::size_t n) { return {std::vector<double>(n, 0.0)}; }

  std::size_t size() const { return potential.size(); }
  std::vector<double> off_diagonal() const { return std::vector<double>(size() - 1, 1.0); }
  FiniteBox reversed() const;
};

enum class Eigensolver { Lapack, QlReference };

/// Full eigendecomposition, eigenvalues ascending, orthonormal vectors.
TridiagonalEigen diagonalize(const FiniteBox& box, Eigensolver solver = Eigensolver::Lapack);
/// Eigenpairs with eigenvalue in [lo, hi] only.
TridiagonalEigen diagonalize_window(const FiniteBox& box, double lo, double hi);

/// ||H psi - E psi||_2
double eigen_residual(const FiniteBox& box, double energy, std::span<const double> psi);

/// A sampled function of energy (Lyapunov exponent), linearly interpolated.
struct EnergyCurve {
  std::vector<double> energies;  // ascending
  std::vector<double> values;

  double operator()(double energy) const;
  bool covers(double energy) const {
    return !energies.empty() && energy >= energies.front() && energy <= energies.back();
  }
};

struct DecayFit {
  double energy = 0.0;
  std::size_t peak = 0;  // 1-based site of max |psi|
  double left_rate = 0.0;
  double right_rate = 0.0;
  double left_r2 = 0.0;
  double right_r2 = 0.0;
  bool has_left = false;
  bool has_right = false;
  /// Mean of the available flank rates.
  double rate() const;
};

struct DecayBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double median_rate = 0.0;
  double gamma = 0.0;  // median of gamma(E) over the bin's eigenvalues
  double relative_error = 0.0;
};

struct DecayOptions {
  /// Eigenvalues closer than this to an excluded energy are skipped.
  double exclusion = 0.05;
  /// ... and closer than this to the extreme eigenvalues of the box.
  double edge_margin = 0.1;
  std::size_t block = 10;
  std::size_t min_blocks = 20;
  /// Keep eigenfunctions peaked in the middle half of the box.
  bool bulk_only = true;
  double bin_width = 0.5;
  std::size_t min_per_bin = 10;
};

struct DecayReport {
  std::vector<DecayFit> fits;
  std::vector<DecayBin> bins;
  double max_relative_error = 0.0;
};

/// Fits exponential decay rates of eigenfunction envelopes and compares
/// their per-bin medians with gamma. Throws InsufficientDataError when no
/// bin has enough eigenpairs.
DecayReport decay_report(const FiniteBox& box, const TridiagonalEigen& spectrum,
                         const EnergyCurve& gamma, std::span<const double> excluded,
                         const DecayOptions& options = {});

/// log|psi(n)|, n = 1..N, for an eigenvalue E of the box: solutions grown
/// inward from both Dirichlet ends and matched at `peak`. Accurate far below
/// the floating-point floor of a directly computed eigenvector.
std::vector<double> log_envelope(const FiniteBox& box, double energy, std::size_t peak);

/// Least-squares decay rate of block maxima of log|psi| on both flanks.
DecayFit fit_decay(std::span<const double> log_psi, std::size_t peak, std::size_t block,
                   std::size_t min_blocks);

struct MomentTrace {
  std::size_t site = 0;
  double p = 2.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> times;
  std::vector<double> moments;
  /// ||P_I delta||^2
  double initial_weight = 0.0;
  /// ||psi(t)||^2 at each time.
  std::vector<double> norms;
  /// Largest relative weight found in the boundary layer over all times.
  double max_boundary_weight = 0.0;
};

struct MomentOptions {
  std::size_t boundary_layer = 10;
  /// Relative weight in the boundary layer above which the box is too small.
  double boundary_tolerance = 1e-6;
  Execution exec = Execution::Parallel;
};

/// Moments sum_n |n - site|^p |psi(t, n)|^2 of psi(t) = exp(-itH) P_I delta_site,
/// computed from the eigenpairs of `spectrum` with eigenvalue in [lower, upper]
/// (the spectrum may hold only that window). Throws EnlargeBoxError when the
/// boundary weight exceeds the tolerance.
MomentTrace evolve_moments(const FiniteBox& box, const TridiagonalEigen& spectrum, std::size_t site,
                           double p, double lower, double upper, std::span<const double> times,
                           const MomentOptions& options = {});

/// Least-squares slope of log moment against log time over times >= t_from.
double loglog_slope(const MomentTrace& trace, double t_from);
double loglog_slope(std::span<const double> times, std::span<const double> values, double t_from);

/// Moments normalized by ||P_I delta||^2, aggregated over disorder samples.
/// The arithmetic mean is dominated by rare resonant samples at any finite
/// sample size, so the geometric mean is the statistic to fit slopes to.
struct MomentEnsemble {
  std::vector<double> times;
  std::vector<double> typical;  // geometric mean over realizations
  std::vector<double> mean;
  /// Largest value over realizations and over all times up to this one.
  std::vector<double> sup;
  std::size_t realizations = 0;
  /// Samples whose filtered initial state vanished identically.
  std::size_t skipped = 0;
  double max_boundary_weight = 0.0;
};

/// evolve_moments on boxes sampled with seeds derive_seed(seed, {r}).
MomentEnsemble ensemble_moments(const WordModel& model, std::size_t box_size,
                                std::size_t realizations, std::size_t site, double p,
                                double lower, double upper, std::span<const double> times,
                                std::uint64_t seed, const MomentOptions& options = {});

struct IdsCurve {
  std::vector<double> energies;
  std::vector<double> mean;
  /// Standard deviation across realizations.
  std::vector<double> spread;
  std::size_t realizations = 0;
  std::size_t box_size = 0;

  double operator()(double energy) const;
};

/// Averaged normalized eigenvalue counting function over boxes sampled with
/// seeds derive_seed(seed, {r}).
IdsCurve ids(const WordModel& model, std::size_t box_size, std::size_t realizations,
             std::span<const double> energies, std::uint64_t seed,
             Execution exec = Execution::Parallel);

/// 1 - arccos(E/2)/pi on [-2, 2], clamped outside.
double free_ids(double energy);

struct ThoulessReport {
  std::vector<double> energies;
  std::vector<double> gamma;
  std::vector<double> log_potential;
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// Integral of ln|E - E'| against the piecewise-linear IDS, with each cell
/// integrated exactly.
double ids_log_potential(const IdsCurve& ids, double energy);

/// Compares gamma(E) with the log potential of the IDS. Throws ConfigError
/// when the IDS grid does not run from 0 to 1 or gamma does not cover E.
ThoulessReport thouless_check(const EnergyCurve& gamma, const IdsCurve& ids,
                              std::span<const double> test_energies);

}  // namespace randword
