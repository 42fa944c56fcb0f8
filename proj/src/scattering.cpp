#include "randword/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "randword/errors.hpp"
#include "randword/transfer.hpp"

namespace randword {

InsertionProblem InsertionProblem::from_words(const Word& w0, const Word& w1) {
  if (w0.length() == 0 || w1.length() == 0) throw ConfigError("insertion problem needs non-empty words");
  return {PeriodicBackground::from_word(w0), w1};
}

double InsertionProblem::potential(std::int64_t n) const {
  const auto m = static_cast<std::int64_t>(insertion.length());
  if (n <= 0) return background.at(n);
  if (n <= m) return insertion[static_cast<std::size_t>(n - 1)];
  return background.at(n - m);
}

bool InsertionProblem::potentials_differ() const {
  const auto m = static_cast<std::int64_t>(insertion.length());
  const auto p = static_cast<std::int64_t>(background.period());
  for (std::int64_t n = 1; n <= m; ++n)
    if (insertion[static_cast<std::size_t>(n - 1)] != background.at(n)) return true;
  for (std::int64_t n = m + 1; n <= m + p; ++n)
    if (background.at(n - m) != background.at(n)) return true;
  return false;
}

namespace {

struct Solve2 {
  cplx x, y;
  double condition;
};

/// Solves [col0, col1] (x, y)^T = rhs by explicit inversion.
Solve2 solve_columns(Vec2<cplx> col0, Vec2<cplx> col1, Vec2<cplx> rhs) {
  const TransferMatrix2 F{col0.first, col1.first, col0.second, col1.second};
  const cplx det = F.det();
  if (det == 0.0) throw ConditioningError("Floquet basis is singular");
  const TransferMatrix2 inv = F.inverse();
  const auto sol = inv * rhs;
  return {sol.first, sol.second, F.norm() * inv.norm()};
}

Vec2<cplx> scale(cplx s, Vec2<cplx> v) { return {s * v.first, s * v.second}; }

void check_condition(double cond, cplx z) {
  if (cond > kConditionLimit) {
    std::ostringstream msg;
    msg << "Floquet basis too ill-conditioned at z = " << z << " (cond " << cond << ")";
    throw ConditioningError(msg.str());
  }
}

}  // namespace

ScatterPoint scattering_coefficients(const InsertionProblem& problem, cplx z, Branch start,
                                     std::size_t offset_periods) {
  const auto f = floquet_multipliers(problem.background, z, Strip::Band);
  const bool plus = start == Branch::Plus;
  const Vec2<cplx> vs{1.0, plus ? f.c_plus : f.c_minus};
  const Vec2<cplx> vo{1.0, plus ? f.c_minus : f.c_plus};
  const cplx rs = plus ? f.rho_plus : f.rho_minus;
  const cplx ro = plus ? f.rho_minus : f.rho_plus;

  Solve2 sol;
  if (offset_periods == 0) {
    sol = solve_columns(scale(rs, vs), scale(ro, vo), word_matrix(problem.insertion, z) * vs);
  } else {
    const auto k = static_cast<std::int64_t>(offset_periods);
    const auto p = static_cast<std::int64_t>(problem.background.period());
    const auto m = static_cast<std::int64_t>(problem.insertion_length());
    const auto u = solve_difference([&](std::int64_t n) { return problem.potential(n); }, z, vs,
                                    1 - k * p, m + k * p + 1);
    const auto power = static_cast<int>(k + 1);
    sol = solve_columns(scale(std::pow(rs, power), vs), scale(std::pow(ro, power), vo),
                        {u.at(m + k * p + 1), u.at(m + k * p)});
  }
  check_condition(sol.condition, z);

  ScatterPoint out;
  out.energy = z;
  out.a = sol.x;
  out.b = sol.y;
  out.condition = sol.condition;
  out.flagged = sol.condition > kConditionFlag;
  out.residual = std::abs(std::norm(out.a) - std::norm(out.b) - 1.0);
  return out;
}

GapScatterPoint gap_coefficients(const InsertionProblem& problem, cplx z) {
  const auto f = floquet_multipliers(problem.background, z, Strip::Split);
  const Vec2<cplx> v1{1.0, f.c_plus}, v2{1.0, f.c_minus};
  const TransferMatrix2 M = word_matrix(problem.insertion, z);
  const auto s1 = solve_columns(scale(f.rho_plus, v1), scale(f.rho_minus, v2), M * v1);
  const auto s2 = solve_columns(scale(f.rho_minus, v2), scale(f.rho_plus, v1), M * v2);
  check_condition(std::max(s1.condition, s2.condition), z);
  GapScatterPoint out;
  out.energy = z;
  out.a1 = s1.x;
  out.b1 = s1.y;
  out.a2 = s2.x;
  out.b2 = s2.y;
  out.condition = std::max(s1.condition, s2.condition);
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

/// Adds root to out unless an existing root lies within `radius`; keeps the smaller residual.
void insert_root(std::vector<RootReport>& out, RootReport root, double radius = 1e-8) {
  for (auto& r : out) {
    if (std::abs(r.energy - root.energy) < radius) {
      if (root.residual < r.residual) r = root;
      return;
    }
  }
  out.push_back(root);
}

template <class F>
double bisect_sign(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::isnan(fm)) break;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Local minima of |values| refined by golden section, kept when below accept.
template <class F, class R>
void minima_roots(const std::vector<double>& x, const std::vector<double>& values, F&& magnitude,
                  R&& residual, const RootScanOptions& options, std::vector<RootReport>& out,
                  double radius = 1e-8) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    const bool left_ok = i == 0 || std::isnan(values[i - 1]) || v <= values[i - 1];
    const bool right_ok = i + 1 == n || std::isnan(values[i + 1]) || v <= values[i + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = x[i == 0 ? 0 : i - 1];
    const double hi = x[i + 1 == n ? n - 1 : i + 1];
    const double e = golden_section(magnitude, lo, hi, options.energy_tolerance);
    const double r = residual(e);
    if (r < options.accept) insert_root(out, {e, r}, radius);
  }
}

}  // namespace

std::vector<RootReport> find_b_roots(const InsertionProblem& problem, const BandStructure& bands,
                                     std::size_t band_index, const RootScanOptions& options) {
  if (!problem.potentials_differ())
    throw ConfigError("find_b_roots: the insertion reproduces the periodic background");
  if (band_index >= bands.bands.size()) throw ConfigError("find_b_roots: band index out of range");
  const Band& band = bands.bands[band_index];

  auto magnitude = [&](double e) {
    try {
      return std::abs(scattering_coefficients(problem, e).b);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<RootReport> out;
  for (const auto& [lo, hi] : bands.stability_intervals) {
    if (lo < band.lower || hi > band.upper) continue;
    const double a = lo + options.edge_exclusion, b = hi - options.edge_exclusion;
    if (!(b > a)) continue;
    const auto x = linspace(a, b, options.grid);
    std::vector<double> values(x.size());
    for_each_index(x.size(), options.exec, [&](std::size_t i) { values[i] = magnitude(x[i]); });
    minima_roots(x, values, magnitude, magnitude, options, out);
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.energy < r.energy; });
  return out;
}

std::vector<RootReport> find_gap_roots(const InsertionProblem& problem, const BandStructure& bands,
                                       std::size_t gap_index, const RootScanOptions& options) {
  if (!problem.potentials_differ())
    throw ConfigError("find_gap_roots: the insertion reproduces the periodic background");
  if (gap_index >= bands.gaps.size()) throw ConfigError("find_gap_roots: gap index out of range");
  const Gap& gap = bands.gaps[gap_index];
  double a = gap.lower + options.edge_exclusion, b = gap.upper - options.edge_exclusion;
  if (!std::isfinite(gap.lower)) a = gap.upper - options.unbounded_reach;
  if (!std::isfinite(gap.upper)) b = gap.lower + options.unbounded_reach;
  if (!(b > a)) return {};

  auto factors = [&](double e) -> std::array<double, 4> {
    try {
      const auto g = gap_coefficients(problem, e);
      return {g.a1.real(), g.b1.real(), g.a2.real(), g.b2.real()};
    } catch (const NumericError&) {
      return {kNaN, kNaN, kNaN, kNaN};
    }
  };
  auto product = [&](double e) {
    const auto f = factors(e);
    const double v = std::abs(f[0] * f[1] * f[2] * f[3]);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  const auto x = linspace(a, b, options.grid);
  std::vector<std::array<double, 4>> values(x.size());
  for_each_index(x.size(), options.exec, [&](std::size_t i) { values[i] = factors(x[i]); });

  std::vector<RootReport> out;
  auto factor = [&](std::size_t k) { return [&, k](double e) { return factors(e)[k]; }; };
  // Odd-order zeros: sign changes, refined by bisection.
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double f0 = values[i][k], f1 = values[i + 1][k];
      if (std::isnan(f0) || std::isnan(f1)) continue;
      if (f0 == 0.0) {
        insert_root(out, {x[i], product(x[i])});
      } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
        const double e = bisect_sign(factor(k), x[i], x[i + 1], options.energy_tolerance);
        const double r = product(e);
        if (r < options.accept) insert_root(out, {e, r});
      }
    }
  }
  // Even-order zeros touch zero without a sign change. Golden section only
  // resolves them to about sqrt(machine epsilon), so they yield to any
  // bisected root within 1e-6.
  for (std::size_t k = 0; k < 4; ++k) {
    auto magnitude = [&](double e) {
      const double v = std::abs(factors(e)[k]);
      return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    std::vector<double> column(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) column[i] = std::abs(values[i][k]);
    minima_roots(x, column, magnitude, product, options, out, 1e-6);
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.energy < r.energy; });
  return out;
}

}  // namespace randword
