#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "randword/errors.hpp"
#include "randword/matrix2.hpp"
#include "randword/polynomial.hpp"
#include "randword/word_model.hpp"

namespace randword {

/// p-periodic potential given by one period V(1..p).
struct PeriodicBackground {
  std::vector<double> values;

  PeriodicBackground() = default;
  explicit PeriodicBackground(std::vector<double> v);
  static PeriodicBackground from_word(const Word& w) { return PeriodicBackground(w.values); }

  std::size_t period() const { return values.size(); }
  /// V_per(n) for any integer n, with V_per(1) = values[0].
  double at(std::int64_t n) const;
};

TransferMatrix2 monodromy(const PeriodicBackground& bg, cplx z);
RealMatrix2 monodromy(const PeriodicBackground& bg, double energy);

/// g0(z) with polynomial entries.
struct MonodromyPoly {
  Polynomial a, b, c, d;
};
MonodromyPoly monodromy_poly(const PeriodicBackground& bg);

/// D(z) = Tr g0(z); monic of degree p.
Polynomial discriminant_poly(const PeriodicBackground& bg);

struct Band {
  double lower = 0.0;
  double upper = 0.0;
  double d_lower = 0.0;  // D at the lower edge
  double d_upper = 0.0;
};

/// Open gap; the outermost gaps have an infinite end.
struct Gap {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
};

struct BandStructure {
  Polynomial discriminant;
  /// Maximal closed intervals with |D| <= 2, ascending. Closed gaps are merged.
  std::vector<Band> bands;
  /// Open gaps between bands plus the two unbounded ones.
  std::vector<Gap> gaps;
  /// Closed gaps: points inside a band where D touches +-2 (g0 = +-I).
  std::vector<double> degenerate_points;
  /// Open intervals with |D| < 2: bands with the degenerate points removed.
  std::vector<std::pair<double, double>> stability_intervals;

  /// All band edges and degenerate points, ascending.
  std::vector<double> edges() const;
  /// Distance from x to the nearest edge or degenerate point.
  double edge_distance(double x) const;
  /// Index of the stability interval containing x at distance > tol from its ends, or -1.
  int stability_index(double x, double tol = 0.0) const;
  /// Index of the gap containing x at distance > tol from its ends, or -1.
  int gap_index(double x, double tol = 0.0) const;
};

/// Real roots of D -+ 2 sorted and paired into bands. Throws NumericError
/// (with residual) if root polishing fails.
BandStructure band_structure(const PeriodicBackground& bg);

/// Which pair of branches of rho^2 - D rho + 1 = 0 is requested.
///  Band:  rho_plus contracts for Im z > 0 and expands for Im z < 0; on a
///         band interior |rho| = 1 and the label follows the limit from above.
///  Split: rho_plus holds rho_1 (|rho_1| < 1) and rho_minus holds rho_2.
enum class Strip { Band, Split };

enum class Branch { Plus, Minus };

struct FloquetData {
  cplx z;
  cplx rho_plus;
  cplx rho_minus;
  /// Second eigenvector components, v = (1, c).
  cplx c_plus;
  cplx c_minus;
  Strip strip = Strip::Band;
  /// u_N(p+1, z), the denominator of c.
  cplx dirichlet_denominator;
};

/// Points with |D^2 - 4| below this are treated as branch points.
inline constexpr double kBranchPointTolerance = 1e-10;
/// |u_N(p+1, z)| below this makes (1, c) undefined.
inline constexpr double kDirichletTolerance = 1e-12;

/// Throws BranchPointError at D^2 = 4, ConfigError when a real z lies outside
/// the requested strip (a gap for Band, a band interior for Split), and
/// DirichletEigenvalueError when u_N(p+1, z) vanishes.
FloquetData floquet_multipliers(const PeriodicBackground& bg, cplx z, Strip strip);

/// v = (1, c) for the requested branch.
Vec2<cplx> floquet_eigenvector(const PeriodicBackground& bg, cplx z, Branch branch,
                               Strip strip = Strip::Band);

/// Samples of a solution u of u(n+1) + u(n-1) + V(n) u(n) = z u(n) on
/// [n_min, n_max], seeded by (u(1), u(0)).
struct Solution {
  std::int64_t n_min = 0;
  std::vector<cplx> values;

  cplx at(std::int64_t n) const { return values.at(static_cast<std::size_t>(n - n_min)); }
  std::int64_t n_max() const { return n_min + static_cast<std::int64_t>(values.size()) - 1; }
};

/// Forward and backward recursion from init = (u(1), u(0)). Requires
/// n_min <= 0 and n_max >= 1. `potential(n)` is queried on [n_min + 1, n_max - 1].
template <class Potential>
Solution solve_difference(Potential&& potential, cplx z, Vec2<cplx> init, std::int64_t n_min,
                          std::int64_t n_max);

// ---------------------------------------------------------------------------

template <class Potential>
Solution solve_difference(Potential&& potential, cplx z, Vec2<cplx> init, std::int64_t n_min,
                          std::int64_t n_max) {
  if (n_min > 0 || n_max < 1) throw ConfigError("solve_difference: range must contain 0 and 1");
  Solution s;
  s.n_min = n_min;
  s.values.assign(static_cast<std::size_t>(n_max - n_min + 1), cplx{});
  auto ref = [&](std::int64_t n) -> cplx& { return s.values[static_cast<std::size_t>(n - n_min)]; };
  ref(1) = init.first;
  ref(0) = init.second;
  for (std::int64_t n = 1; n < n_max; ++n) ref(n + 1) = (z - potential(n)) * ref(n) - ref(n - 1);
  for (std::int64_t n = 0; n > n_min; --n) ref(n - 1) = (z - potential(n)) * ref(n) - ref(n + 1);
  return s;
}

}  // namespace randword
