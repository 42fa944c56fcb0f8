#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "randword/floquet.hpp"
#include "randword/parallel.hpp"
#include "randword/word_model.hpp"

namespace randword {

/// A word w1 inserted into the periodic background built from w0:
/// V(n) = V_per(n) for n <= 0, w1(n) for 1 <= n <= m, V_per(n - m) for n > m.
struct InsertionProblem {
  PeriodicBackground background;
  Word insertion;

  static InsertionProblem from_words(const Word& w0, const Word& w1);

  std::size_t insertion_length() const { return insertion.length(); }
  /// The composite potential V(n).
  double potential(std::int64_t n) const;
  /// False exactly when V equals V_per everywhere.
  bool potentials_differ() const;
};

/// Points with Floquet-basis condition number above this are flagged.
inline constexpr double kConditionFlag = 1e8;
/// ... and above this they are rejected.
inline constexpr double kConditionLimit = 1e12;

struct ScatterPoint {
  cplx energy;
  cplx a;
  cplx b;
  /// | |a|^2 - |b|^2 - 1 |; only meaningful on the real axis.
  double residual = 0.0;
  double condition = 1.0;
  bool flagged = false;
};

/// a(z), b(z) from u_+ (or u_- with start = Minus, in which case the pair
/// is the expansion in (phi_-, phi_+)). z must lie in the band strip.
/// `offset_periods` > 0 recomputes the coefficients by propagating the
/// solution from 1 - k p to m + k p instead of using the word matrix, which
/// must give the same answer.
ScatterPoint scattering_coefficients(const InsertionProblem& problem, cplx z,
                                     Branch start = Branch::Plus, std::size_t offset_periods = 0);

/// Coefficients of both Jost solutions u_1, u_2 on the split strip.
struct GapScatterPoint {
  cplx energy;
  cplx a1, b1, a2, b2;
  double condition = 1.0;

  cplx product() const { return a1 * b1 * a2 * b2; }
};

GapScatterPoint gap_coefficients(const InsertionProblem& problem, cplx z);

struct RootReport {
  double energy = 0.0;
  /// |b| (band roots) or |a1 b1 a2 b2| (gap roots) at the refined energy.
  double residual = 0.0;
};

struct RootScanOptions {
  std::size_t grid = 801;
  /// Distance kept from band edges and closed-gap points.
  double edge_exclusion = 1e-3;
  /// Accepted |b| (or |a1 b1 a2 b2|) at a refined minimum.
  double accept = 1e-7;
  double energy_tolerance = 1e-10;
  /// Length of the scanned part of an unbounded gap.
  double unbounded_reach = 6.0;
  Execution exec = Execution::Parallel;
};

/// Roots of b inside one band (index into BandStructure::bands). Throws
/// ConfigError when V = V_per.
std::vector<RootReport> find_b_roots(const InsertionProblem& problem, const BandStructure& bands,
                                     std::size_t band_index, const RootScanOptions& options = {});

/// Roots of a1 b1 a2 b2 inside one gap (index into BandStructure::gaps).
std::vector<RootReport> find_gap_roots(const InsertionProblem& problem, const BandStructure& bands,
                                       std::size_t gap_index, const RootScanOptions& options = {});

/// Golden-section minimization of f on [lo, hi] down to width tol.
template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double r = 0.6180339887498949;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace randword
