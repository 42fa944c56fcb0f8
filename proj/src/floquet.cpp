#include "randword/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "randword/errors.hpp"
#include "randword/transfer.hpp"

namespace randword {

PeriodicBackground::PeriodicBackground(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw ConfigError("periodic background needs period >= 1");
}

double PeriodicBackground::at(std::int64_t n) const {
  const auto p = static_cast<std::int64_t>(values.size());
  std::int64_t r = (n - 1) % p;
  if (r < 0) r += p;
  return values[static_cast<std::size_t>(r)];
}

TransferMatrix2 monodromy(const PeriodicBackground& bg, cplx z) {
  auto m = TransferMatrix2::identity();
  for (double v : bg.values) m = site_matrix(v, z) * m;
  return m;
}

RealMatrix2 monodromy(const PeriodicBackground& bg, double energy) {
  auto m = RealMatrix2::identity();
  for (double v : bg.values) m = site_matrix(v, energy) * m;
  return m;
}

MonodromyPoly monodromy_poly(const PeriodicBackground& bg) {
  MonodromyPoly m{Polynomial{1.0}, Polynomial{}, Polynomial{}, Polynomial{1.0}};
  for (double v : bg.values) {
    const Polynomial f = Polynomial::linear(v);
    MonodromyPoly next{f * m.a - m.c, f * m.b - m.d, m.a, m.b};
    m = std::move(next);
  }
  return m;
}

Polynomial discriminant_poly(const PeriodicBackground& bg) {
  const auto m = monodromy_poly(bg);
  return m.a + m.d;
}

std::vector<double> BandStructure::edges() const {
  std::vector<double> out;
  for (const auto& b : bands) {
    out.push_back(b.lower);
    out.push_back(b.upper);
  }
  out.insert(out.end(), degenerate_points.begin(), degenerate_points.end());
  std::sort(out.begin(), out.end());
  return out;
}

double BandStructure::edge_distance(double x) const {
  double best = std::numeric_limits<double>::infinity();
  for (double e : edges()) best = std::min(best, std::abs(x - e));
  return best;
}

int BandStructure::stability_index(double x, double tol) const {
  for (std::size_t i = 0; i < stability_intervals.size(); ++i) {
    const auto& [lo, hi] = stability_intervals[i];
    if (x > lo + tol && x < hi - tol) return static_cast<int>(i);
  }
  return -1;
}

int BandStructure::gap_index(double x, double tol) const {
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (x > gaps[i].lower + tol && x < gaps[i].upper - tol) return static_cast<int>(i);
  return -1;
}

BandStructure band_structure(const PeriodicBackground& bg) {
  BandStructure bs;
  bs.discriminant = discriminant_poly(bg);
  const Polynomial& D = bs.discriminant;

  std::vector<double> roots = real_roots(D - Polynomial{2.0});
  const auto lower_roots = real_roots(D + Polynomial{2.0});
  roots.insert(roots.end(), lower_roots.begin(), lower_roots.end());
  std::sort(roots.begin(), roots.end());
  if (roots.size() != 2 * bg.period()) {
    std::ostringstream msg;
    msg << "expected " << 2 * bg.period() << " real band edges, found " << roots.size();
    throw NumericError(msg.str());
  }

  for (std::size_t k = 0; k + 1 < roots.size(); k += 2) {
    const double lo = roots[k], hi = roots[k + 1];
    const bool touches = !bs.bands.empty() &&
                         std::abs(lo - bs.bands.back().upper) <= 1e-9 * std::max(1.0, std::abs(lo));
    if (touches) {
      bs.degenerate_points.push_back(bs.bands.back().upper);
      bs.bands.back().upper = hi;
      bs.bands.back().d_upper = D(hi);
    } else {
      bs.bands.push_back({lo, hi, D(lo), D(hi)});
    }
  }

  double left = -std::numeric_limits<double>::infinity();
  for (const auto& b : bs.bands) {
    bs.gaps.push_back({left, b.lower});
    left = b.upper;
  }
  bs.gaps.push_back({left, std::numeric_limits<double>::infinity()});

  for (const auto& b : bs.bands) {
    double lo = b.lower;
    for (double d : bs.degenerate_points) {
      if (d > b.lower && d < b.upper) {
        bs.stability_intervals.emplace_back(lo, d);
        lo = d;
      }
    }
    bs.stability_intervals.emplace_back(lo, b.upper);
  }
  return bs;
}

FloquetData floquet_multipliers(const PeriodicBackground& bg, cplx z, Strip strip) {
  const TransferMatrix2 g0 = monodromy(bg, z);
  const cplx D = g0.trace();
  const cplx disc = D * D - 4.0;
  if (std::abs(disc) < kBranchPointTolerance * std::max(1.0, std::norm(D))) {
    std::ostringstream msg;
    msg << "z = " << z << " is a branch point (D^2 = 4)";
    throw BranchPointError(msg.str());
  }

  FloquetData out;
  out.z = z;
  out.strip = strip;
  out.dirichlet_denominator = g0.b;

  if (z.imag() == 0.0) {
    const double d = D.real();
    const bool in_band = std::abs(d) < 2.0;
    if (strip == Strip::Band && !in_band) {
      std::ostringstream msg;
      msg << "energy " << z.real() << " is not inside a band (D = " << d << ")";
      throw ConfigError(msg.str());
    }
    if (strip == Strip::Split && in_band) {
      std::ostringstream msg;
      msg << "energy " << z.real() << " is inside a band (D = " << d << "); split strip needs a gap";
      throw ConfigError(msg.str());
    }
    if (in_band) {
      // Limit from the upper half-plane: rho_+ contracts there exactly when
      // sin(arg rho_+) has the opposite sign of D'.
      const double slope = discriminant_poly(bg).derivative()(z.real());
      const double s = slope > 0 ? 1.0 : -1.0;
      const double root = std::sqrt(4.0 - d * d);
      out.rho_plus = cplx(0.5 * d, -0.5 * s * root);
      out.rho_minus = std::conj(out.rho_plus);
    } else {
      const double big = 0.5 * (d + std::copysign(std::sqrt(d * d - 4.0), d));
      out.rho_plus = 1.0 / big;
      out.rho_minus = big;
    }
  } else {
    cplx root = std::sqrt(disc);
    if (std::abs(D + root) < std::abs(D - root)) root = -root;
    const cplx big = 0.5 * (D + root);
    const cplx small = 1.0 / big;
    const bool plus_contracts = strip == Strip::Split || z.imag() > 0.0;
    out.rho_plus = plus_contracts ? small : big;
    out.rho_minus = plus_contracts ? big : small;
  }

  if (std::abs(g0.b) < kDirichletTolerance) {
    std::ostringstream msg;
    msg << "u_N(p+1, z) vanishes at z = " << z << " (Dirichlet eigenvalue)";
    throw DirichletEigenvalueError(msg.str());
  }
  out.c_plus = (out.rho_plus - g0.a) / g0.b;
  out.c_minus = (out.rho_minus - g0.a) / g0.b;
  return out;
}

Vec2<cplx> floquet_eigenvector(const PeriodicBackground& bg, cplx z, Branch branch, Strip strip) {
  const auto f = floquet_multipliers(bg, z, strip);
  return {1.0, branch == Branch::Plus ? f.c_plus : f.c_minus};
}

}  // namespace randword
