#include "randword/furstenberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "randword/errors.hpp"
#include "randword/rng.hpp"
#include "randword/transfer.hpp"

namespace randword {

namespace {

constexpr double kTraceTol = 1e-9;
constexpr double kScalarTol = 1e-9;
constexpr double kDirectionTol = 1e-9;
constexpr double kFixedPointTol = 1e-8;

enum class Kind { Scalar, Elliptic, Parabolic, Hyperbolic };

bool is_scalar(const RealMatrix2& g) {
  return distance(g, RealMatrix2::identity()) < kScalarTol ||
         distance(g, -1.0 * RealMatrix2::identity()) < kScalarTol;
}

Kind classify(const RealMatrix2& g) {
  if (is_scalar(g)) return Kind::Scalar;
  const double t = std::abs(g.trace());
  if (t > 2.0 + kTraceTol) return Kind::Hyperbolic;
  if (t >= 2.0 - kTraceTol) return Kind::Parabolic;
  return Kind::Elliptic;
}

/// Fixed point in the upper half-plane of an elliptic element acting by
/// Moebius transformations.
cplx upper_fixed_point(const RealMatrix2& g) {
  const double t = g.trace();
  const cplx root = std::sqrt(cplx(t * t - 4.0, 0.0));
  cplx z = ((g.a - g.d) + root) / (2.0 * g.c);
  if (z.imag() < 0) z = std::conj(z);
  return z;
}

/// Real eigendirections as angles in [0, pi); empty for elliptic or scalar g.
std::vector<double> eigendirections(const RealMatrix2& g) {
  std::vector<double> out;
  if (is_scalar(g)) return out;
  const double t = g.trace();
  const double disc = t * t - 4.0 * g.det();
  if (disc < -kTraceTol) return out;
  const double root = std::sqrt(std::max(disc, 0.0));
  for (double lambda : {0.5 * (t + root), 0.5 * (t - root)}) {
    // Two candidate eigenvectors; the longer is the better conditioned.
    const double x1 = g.b, y1 = lambda - g.a;
    const double x2 = lambda - g.d, y2 = g.c;
    const bool first = std::hypot(x1, y1) >= std::hypot(x2, y2);
    const double x = first ? x1 : x2, y = first ? y1 : y2;
    if (std::hypot(x, y) == 0.0) continue;
    double theta = std::atan2(y, x);
    if (theta < 0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    if (std::none_of(out.begin(), out.end(),
                     [&](double o) { return direction_distance(o, theta) < kDirectionTol; }))
      out.push_back(theta);
  }
  return out;
}

bool preserves(const RealMatrix2& g, const std::vector<double>& set) {
  for (double d : set) {
    const double image = act_on_direction(g, d);
    if (std::none_of(set.begin(), set.end(),
                     [&](double o) { return direction_distance(o, image) < 1e-7; }))
      return false;
  }
  return true;
}

}  // namespace

GeneratorSet GeneratorSet::from_model(const WordModel& model, double energy) {
  if (!model.is_atomic())
    throw UnsupportedModeError("group checks need an atomic model (enumerable support)");
  GeneratorSet gens;
  gens.energy = energy;
  for (const auto& atom : model.support()) gens.matrices.push_back(word_matrix(atom.word, energy));
  return gens;
}

double act_on_direction(const RealMatrix2& g, double theta) {
  const double x = g.a * std::cos(theta) + g.b * std::sin(theta);
  const double y = g.c * std::cos(theta) + g.d * std::sin(theta);
  double out = std::atan2(y, x);
  if (out < 0) out += std::numbers::pi;
  if (out >= std::numbers::pi) out -= std::numbers::pi;
  return out;
}

double direction_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

CompactnessReport check_noncompact(const GeneratorSet& gens) {
  if (gens.matrices.empty()) throw ConfigError("check_noncompact needs at least one generator");
  CompactnessReport rep;
  const auto& g = gens.matrices;

  for (std::size_t i = 0; i < g.size(); ++i) {
    const Kind k = classify(g[i]);
    if (k == Kind::Hyperbolic) {
      rep.noncompact = true;
      rep.certificate = "generator " + std::to_string(i) + " is hyperbolic, |trace| = " +
                        std::to_string(std::abs(g[i].trace()));
      return rep;
    }
    if (k == Kind::Parabolic) {
      rep.noncompact = true;
      rep.certificate = "generator " + std::to_string(i) + " is parabolic and not +-I";
      return rep;
    }
  }

  // Words of length 2..4 in the generators.
  const std::size_t n = g.size();
  if (n <= 8) {
    std::vector<std::pair<RealMatrix2, std::string>> level;
    for (std::size_t i = 0; i < n; ++i) level.emplace_back(g[i], std::to_string(i));
    for (int len = 2; len <= 4; ++len) {
      std::vector<std::pair<RealMatrix2, std::string>> next;
      next.reserve(level.size() * n);
      for (const auto& [m, name] : level) {
        for (std::size_t i = 0; i < n; ++i) {
          const RealMatrix2 prod = g[i] * m;
          if (std::abs(prod.trace()) > 2.0 + kTraceTol) {
            rep.noncompact = true;
            rep.certificate = "product " + std::to_string(i) + "." + name +
                              " has |trace| = " + std::to_string(std::abs(prod.trace()));
            return rep;
          }
          next.emplace_back(prod, std::to_string(i) + "." + name);
        }
      }
      level = std::move(next);
    }
  }

  // Every generator is elliptic or +-I.
  std::vector<cplx> fixed;
  bool conditioned = true;
  for (const auto& m : g) {
    if (classify(m) != Kind::Elliptic) continue;
    if (std::abs(m.c) < 1e-12) {
      conditioned = false;
      break;
    }
    fixed.push_back(upper_fixed_point(m));
  }
  if (conditioned) {
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      for (std::size_t j = i + 1; j < fixed.size(); ++j) {
        if (std::abs(fixed[i] - fixed[j]) > kFixedPointTol) {
          rep.noncompact = true;
          std::ostringstream os;
          os << "elliptic generators with distinct fixed points " << fixed[i] << " and " << fixed[j];
          rep.certificate = os.str();
          return rep;
        }
      }
    }
    rep.noncompact = false;
    rep.certificate = fixed.empty() ? "all generators are +-I"
                                    : "elliptic generators share a fixed point; compact up to centre";
    return rep;
  }

  // Fallback probe: growth of long random products.
  Rng rng(derive_seed(0x6675727374ULL, {static_cast<std::uint64_t>(n)}));
  double log_norm = 0.0;
  RealMatrix2 prod = RealMatrix2::identity();
  for (int step = 0; step < 1000; ++step) {
    prod = g[rng.below(n)] * prod;
    const double nm = prod.norm();
    log_norm += std::log(nm);
    prod *= 1.0 / nm;
  }
  rep.heuristic = true;
  rep.noncompact = log_norm > std::log(1e3);
  rep.certificate = "norm-growth probe: ln||product of 1000|| = " + std::to_string(log_norm);
  return rep;
}

IrreducibilityReport check_strong_irreducibility(const GeneratorSet& gens) {
  IrreducibilityReport rep;
  std::vector<RealMatrix2> g;
  for (const auto& m : gens.matrices) {
    if (is_scalar(m)) continue;
    if (std::none_of(g.begin(), g.end(), [&](const RealMatrix2& o) { return distance(o, m) < 1e-12; }))
      g.push_back(m);
  }

  if (g.size() < 2) {
    rep.strongly_irreducible = false;
    if (g.empty()) {
      rep.witness = {0.0};
    } else {
      rep.witness = eigendirections(g[0]);
      if (rep.witness.empty()) {
        // Elliptic: report the orbit of the horizontal direction when finite.
        std::vector<double> orbit{0.0};
        for (int k = 0; k < 24; ++k) {
          const double next = act_on_direction(g[0], orbit.back());
          if (direction_distance(next, orbit.front()) < kDirectionTol) {
            rep.witness = orbit;
            break;
          }
          orbit.push_back(next);
        }
      }
    }
    return rep;
  }
  rep.heuristic = g.size() > 2;

  std::vector<double> candidates;
  auto add = [&](const RealMatrix2& m) {
    for (double d : eigendirections(m))
      if (std::none_of(candidates.begin(), candidates.end(),
                       [&](double o) { return direction_distance(o, d) < kDirectionTol; }))
        candidates.push_back(d);
  };
  for (const auto& m : g) add(m);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (i != j) add(g[i] * g[j]);
  for (const auto& m : g) add(m * m);

  auto all_preserve = [&](const std::vector<double>& set) {
    return std::all_of(g.begin(), g.end(), [&](const RealMatrix2& m) { return preserves(m, set); });
  };
  for (double d : candidates) {
    if (all_preserve({d})) {
      rep.witness = {d};
      return rep;
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (all_preserve({candidates[i], candidates[j]})) {
        rep.witness = {candidates[i], candidates[j]};
        return rep;
      }
    }
  }
  // A generator of order four in PSL(2) swaps e1 with its image; pair it with
  // the other generators when they all preserve that pair.
  for (const auto& m : g) {
    if (distance(m * m, -1.0 * RealMatrix2::identity()) < kScalarTol) {
      for (double d : candidates) {
        const std::vector<double> pair{d, act_on_direction(m, d)};
        if (direction_distance(pair[0], pair[1]) > kDirectionTol && all_preserve(pair)) {
          rep.witness = pair;
          return rep;
        }
      }
    }
  }
  rep.strongly_irreducible = true;
  return rep;
}

ConjugatedPair conjugated_pair(const InsertionProblem& problem, double energy,
                               double edge_tolerance) {
  const double D = monodromy(problem.background, energy).trace();
  if (2.0 - std::abs(D) < edge_tolerance) {
    std::ostringstream msg;
    msg << "energy " << energy << " is within " << edge_tolerance << " of a band edge (D = " << D << ")";
    throw BranchPointError(msg.str());
  }
  const auto f = floquet_multipliers(problem.background, energy, Strip::Band);
  const auto sc = scattering_coefficients(problem, energy);
  ConjugatedPair out;
  out.energy = energy;
  out.omega = std::arg(f.rho_plus);
  out.a = sc.a;
  out.b = sc.b;
  const double c = std::cos(out.omega), s = std::sin(out.omega);
  out.g0_tilde = {c, s, -s, c};
  const cplx plus = sc.a + sc.b, minus = sc.a - sc.b;
  out.s = {plus.real(), plus.imag(), -minus.imag(), minus.real()};
  if (std::abs(out.s.det() - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "det s = " << out.s.det() << " at energy " << energy;
    throw NumericError(msg.str());
  }
  return out;
}

std::string to_string(ExceptionalClass c) {
  switch (c) {
    case ExceptionalClass::BandEdge: return "band_edge";
    case ExceptionalClass::DRoot: return "D_root";
    case ExceptionalClass::BRoot: return "b_root";
    case ExceptionalClass::GapRoot: return "gap_root";
    case ExceptionalClass::CommutingElliptic: return "commuting_elliptic";
  }
  return "unknown";
}

std::vector<double> ExceptionalSet::energies() const {
  std::vector<double> out;
  for (const auto& e : entries) out.push_back(e.energy);
  return out;
}

double ExceptionalSet::distance(double energy) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) best = std::min(best, std::abs(e.energy - energy));
  return best;
}

double commuting_elliptic_indicator(const GeneratorSet& gens) {
  for (const auto& m : gens.matrices)
    if (std::abs(m.trace()) > 2.0 + kTraceTol) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  const auto& g = gens.matrices;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      worst = std::max(worst, (g[i] * g[j] - g[j] * g[i]).max_abs());
  return worst;
}

namespace {

std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

struct GroupVerdict {
  bool fails = false;
  bool heuristic = false;
};

GroupVerdict group_verdict(const WordModel& model, double energy) {
  const auto gens = GeneratorSet::from_model(model, energy);
  const auto nc = check_noncompact(gens);
  const auto si = check_strong_irreducibility(gens);
  return {!nc.noncompact || !si.strongly_irreducible, nc.heuristic || si.heuristic};
}

}  // namespace

ExceptionalSet exceptional_set(const WordModel& model, const Word& w0, const Word& w1,
                               const ExceptionalOptions& options) {
  if (!words_do_not_commute(w0, w1))
    throw ModelDegenerateError("exceptional_set: the words commute, (NC) fails for this pair");
  const double K = std::max({model.bound(), w0.max_abs(), w1.max_abs()});
  const double lo = options.lower.value_or(-2.0 - K);
  const double hi = options.upper.value_or(2.0 + K);
  if (!(hi > lo)) throw ConfigError("exceptional_set: empty energy window");
  // Edges computed as roots can land an ulp outside a window that ends on them.
  auto inside = [&](double e) { return e >= lo - 1e-9 && e <= hi + 1e-9; };

  const auto problem = InsertionProblem::from_words(w0, w1);
  const auto bs = band_structure(problem.background);
  const Polynomial& D = bs.discriminant;

  std::vector<ExceptionalEntry> raw;
  for (const auto& b : bs.bands) {
    for (double e : {b.lower, b.upper})
      if (inside(e)) raw.push_back({e, ExceptionalClass::BandEdge, std::abs(std::abs(D(e)) - 2.0), false});
  }
  for (double e : bs.degenerate_points)
    if (inside(e)) raw.push_back({e, ExceptionalClass::BandEdge, std::abs(std::abs(D(e)) - 2.0), false});
  for (const auto& [a, b] : bs.stability_intervals)
    for (double e : roots_in_interval(D, a, b))
      if (inside(e)) raw.push_back({e, ExceptionalClass::DRoot, std::abs(D(e)), false});

  if (problem.potentials_differ()) {
    for (std::size_t i = 0; i < bs.bands.size(); ++i)
      for (const auto& r : find_b_roots(problem, bs, i, options.roots))
        if (inside(r.energy)) raw.push_back({r.energy, ExceptionalClass::BRoot, r.residual, false});
    for (std::size_t i = 0; i < bs.gaps.size(); ++i)
      for (const auto& r : find_gap_roots(problem, bs, i, options.roots))
        if (inside(r.energy)) raw.push_back({r.energy, ExceptionalClass::GapRoot, r.residual, false});
  }

  // Group criteria on the scan grid.
  const auto x = grid(lo, hi, options.scan_points);
  std::vector<GroupVerdict> verdicts(x.size());
  std::vector<double> indicator(x.size());
  for_each_index(x.size(), options.exec, [&](std::size_t i) {
    verdicts[i] = group_verdict(model, x[i]);
    indicator[i] = commuting_elliptic_indicator(GeneratorSet::from_model(model, x[i]));
  });
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (verdicts[i].fails)
      raw.push_back({x[i], ExceptionalClass::CommutingElliptic, indicator[i], verdicts[i].heuristic});
  }
  // Isolated failures fall between grid points; refine minima of the
  // commutator indicator.
  auto ind = [&](double e) { return commuting_elliptic_indicator(GeneratorSet::from_model(model, e)); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = indicator[i];
    if (!std::isfinite(v)) continue;
    if (i > 0 && !(v <= indicator[i - 1])) continue;
    if (i + 1 < x.size() && !(v <= indicator[i + 1])) continue;
    const double e = golden_section(ind, x[i == 0 ? 0 : i - 1], x[i + 1 == x.size() ? i : i + 1], 1e-12);
    const double r = ind(e);
    if (r < options.commutator_accept) {
      const auto verdict = group_verdict(model, e);
      if (verdict.fails) raw.push_back({e, ExceptionalClass::CommutingElliptic, r, verdict.heuristic});
    }
  }

  // Sort and merge entries closer than 1e-8, keeping the first class listed.
  std::stable_sort(raw.begin(), raw.end(),
                   [](const auto& l, const auto& r) { return l.energy < r.energy; });
  ExceptionalSet out;
  for (const auto& e : raw) {
    if (!out.entries.empty() && e.energy - out.entries.back().energy < 1e-8) {
      auto& last = out.entries.back();
      if (static_cast<int>(e.kind) < static_cast<int>(last.kind)) last = e;
      continue;
    }
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace randword
