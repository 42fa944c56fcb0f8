#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "randword/matrix2.hpp"
#include "randword/parallel.hpp"
#include "randword/word_model.hpp"

namespace randword {

/// T(a, z) = [[z - a, -1], [1, 0]]
TransferMatrix2 site_matrix(double a, cplx z);
RealMatrix2 site_matrix(double a, double energy);

/// M(w, z) = T(w(j), z) ... T(w(1), z)
TransferMatrix2 word_matrix(const Word& w, cplx z);
RealMatrix2 word_matrix(const Word& w, double energy);

enum class LyapunovKind { Word, Site };

struct LyapunovEstimate {
  cplx energy;
  double value = 0.0;   // log-growth per step
  double std_error = 0.0;  // batch-means standard error
  std::size_t steps = 0;
  LyapunovKind kind = LyapunovKind::Word;

  /// Declared zero when |value| < max(1e-2, 3 std_error).
  bool is_zero() const;
};

struct LyapunovOptions {
  /// Running product renormalized every this many factors.
  std::size_t renormalize_every = 32;
  std::size_t batches = 32;
};

/// gamma_0(z): (1/N) ln||M(omega_N) ... M(omega_1)|| over i.i.d. nu-draws.
LyapunovEstimate estimate_gamma0(const WordModel& model, cplx z, std::size_t n_words,
                                 std::uint64_t seed, const LyapunovOptions& options = {});

/// gamma(z): per-site growth along a P-sampled path (random anchor word and offset).
LyapunovEstimate estimate_gamma(const WordModel& model, cplx z, std::size_t n_sites,
                                std::uint64_t seed, const LyapunovOptions& options = {});

struct IdentityReport {
  LyapunovEstimate gamma0;
  LyapunovEstimate gamma;
  double expected_length = 1.0;
  double ratio = 0.0;           // gamma0 / gamma
  double discrepancy = 0.0;     // |gamma0 - <L> gamma|
  double combined_stderr = 0.0; // sqrt(se0^2 + (<L> se)^2)
  bool vacuous = false;         // both exponents declared zero
  bool pass = false;
};

/// Checks gamma_0 = <L> gamma with both estimators run over `site_budget` sites.
IdentityReport verify_length_identity(const WordModel& model, cplx z, std::size_t site_budget,
                                      std::uint64_t seed);

struct GammaCurvePoint {
  cplx energy;
  LyapunovEstimate gamma0;
  LyapunovEstimate gamma;
  double ratio = 0.0;
};

/// Both exponents on an energy grid; per-energy seeds derive_seed(seed, {i}).
std::vector<GammaCurvePoint> gamma_curve(const WordModel& model, std::span<const cplx> energies,
                                         std::size_t site_budget, std::uint64_t seed,
                                         Execution exec = Execution::Parallel);

/// Site exponent only, on a real grid.
std::vector<LyapunovEstimate> gamma_sweep(const WordModel& model, std::span<const double> energies,
                                          std::size_t n_sites, std::uint64_t seed,
                                          Execution exec = Execution::Parallel);

}  // namespace randword
