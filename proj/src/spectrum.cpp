#include "randword/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "randword/errors.hpp"
#include "randword/rng.hpp"

namespace randword {

FiniteBox FiniteBox::sample(const WordModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("box size must be positive");
  return {sample_potential(model, seed, 1, static_cast<std::int64_t>(n)).values};
}

FiniteBox FiniteBox::reversed() const {
  return {std::vector<double>(potential.rbegin(), potential.rend())};
}

TridiagonalEigen diagonalize(const FiniteBox& box, Eigensolver solver) {
  const auto off = box.off_diagonal();
  return solver == Eigensolver::Lapack ? eigh_tridiagonal(box.potential, off)
                                       : eigh_tridiagonal_ql(box.potential, off);
}

TridiagonalEigen diagonalize_window(const FiniteBox& box, double lo, double hi) {
  return eigh_tridiagonal_window(box.potential, box.off_diagonal(), lo, hi);
}

double eigen_residual(const FiniteBox& box, double energy, std::span<const double> psi) {
  const std::size_t n = box.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double h = box.potential[i] * psi[i] - energy * psi[i];
    if (i > 0) h += psi[i - 1];
    if (i + 1 < n) h += psi[i + 1];
    acc += h * h;
  }
  return std::sqrt(acc);
}

double EnergyCurve::operator()(double energy) const {
  if (energies.empty()) throw ConfigError("empty energy curve");
  if (energy <= energies.front()) return values.front();
  if (energy >= energies.back()) return values.back();
  const auto it = std::upper_bound(energies.begin(), energies.end(), energy);
  const std::size_t i = static_cast<std::size_t>(it - energies.begin());
  const double t = (energy - energies[i - 1]) / (energies[i] - energies[i - 1]);
  return (1.0 - t) * values[i - 1] + t * values[i];
}

double DecayFit::rate() const {
  if (has_left && has_right) return 0.5 * (left_rate + right_rate);
  if (has_left) return left_rate;
  return right_rate;
}

std::vector<double> log_envelope(const FiniteBox& box, double energy, std::size_t peak) {
  const std::size_t n = box.size();
  if (peak < 1 || peak > n) throw ConfigError("log_envelope: peak outside the box");
  const auto& V = box.potential;
  std::vector<double> out(n, 0.0);
  constexpr double kBig = 1e100;

  // From the left end: u(0) = 0, u(1) = 1, grown up to the peak.
  {
    double prev = 0.0, cur = 1.0, scale = 0.0;
    out[0] = 0.0;
    for (std::size_t site = 1; site < peak; ++site) {
      const double next = (energy - V[site - 1]) * cur - prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > kBig) {
        scale += std::log(kBig);
        cur /= kBig;
        prev /= kBig;
      }
      out[site] = scale + std::log(std::abs(cur));
    }
  }
  // From the right end: u(N+1) = 0, u(N) = 1, grown down to the peak.
  std::vector<double> right(n, 0.0);
  {
    double prev = 0.0, cur = 1.0, scale = 0.0;
    right[n - 1] = 0.0;
    for (std::size_t site = n; site > peak; --site) {
      const double next = (energy - V[site - 1]) * cur - prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > kBig) {
        scale += std::log(kBig);
        cur /= kBig;
        prev /= kBig;
      }
      right[site - 2] = scale + std::log(std::abs(cur));
    }
  }
  const double shift = out[peak - 1] - right[peak - 1];
  for (std::size_t i = peak; i < n; ++i) out[i] = right[i] + shift;
  const double top = *std::max_element(out.begin(), out.end());
  for (auto& v : out) v -= top;
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.r2 = (sxx > 0 && syy > 0) ? sxy * sxy / (sxx * syy) : 0.0;
  return f;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DecayFit fit_decay(std::span<const double> log_psi, std::size_t peak, std::size_t block,
                   std::size_t min_blocks) {
  const std::size_t n = log_psi.size();
  DecayFit fit;
  fit.peak = peak;
  std::vector<double> x, y;
  // Left flank, blocks ending at the peak.
  for (std::size_t end = peak; end >= block; end -= block) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t s = end - block + 1; s <= end; ++s) top = std::max(top, log_psi[s - 1]);
    x.push_back(static_cast<double>(end) - 0.5 * static_cast<double>(block - 1));
    y.push_back(top);
  }
  if (x.size() >= min_blocks) {
    const auto f = least_squares(x, y);
    fit.has_left = true;
    fit.left_rate = f.slope;
    fit.left_r2 = f.r2;
  }
  x.clear();
  y.clear();
  for (std::size_t start = peak; start + block - 1 <= n; start += block) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t s = start; s < start + block; ++s) top = std::max(top, log_psi[s - 1]);
    x.push_back(static_cast<double>(start) + 0.5 * static_cast<double>(block - 1));
    y.push_back(top);
  }
  if (x.size() >= min_blocks) {
    const auto f = least_squares(x, y);
    fit.has_right = true;
    fit.right_rate = -f.slope;
    fit.right_r2 = f.r2;
  }
  return fit;
}

DecayReport decay_report(const FiniteBox& box, const TridiagonalEigen& spectrum,
                         const EnergyCurve& gamma, std::span<const double> excluded,
                         const DecayOptions& options) {
  if (!spectrum.has_vectors()) throw ConfigError("decay_report needs eigenvectors");
  const std::size_t n = box.size();
  const double e_min = spectrum.values.front(), e_max = spectrum.values.back();
  DecayReport report;
  for (std::size_t k = 0; k < spectrum.count(); ++k) {
    const double e = spectrum.values[k];
    if (e < e_min + options.edge_margin || e > e_max - options.edge_margin) continue;
    if (std::any_of(excluded.begin(), excluded.end(),
                    [&](double x) { return std::abs(x - e) <= options.exclusion; }))
      continue;
    const auto psi = spectrum.vector(k);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
    ++peak;
    if (options.bulk_only && (4 * peak < n || 4 * peak > 3 * n)) continue;
    auto fit = fit_decay(log_envelope(box, e, peak), peak, options.block, options.min_blocks);
    if (!fit.has_left && !fit.has_right) continue;
    fit.energy = e;
    report.fits.push_back(fit);
  }

  const double w = options.bin_width;
  const auto first_bin = static_cast<long>(std::floor(e_min / w));
  const auto last_bin = static_cast<long>(std::floor(e_max / w));
  for (long b = first_bin; b <= last_bin; ++b) {
    DecayBin bin;
    bin.lower = static_cast<double>(b) * w;
    bin.upper = bin.lower + w;
    std::vector<double> rates, gammas;
    for (const auto& f : report.fits) {
      if (f.energy >= bin.lower && f.energy < bin.upper) {
        rates.push_back(f.rate());
        gammas.push_back(gamma(f.energy));
      }
    }
    bin.count = rates.size();
    if (bin.count < options.min_per_bin) continue;
    bin.median_rate = median(rates);
    bin.gamma = median(gammas);
    bin.relative_error = std::abs(bin.median_rate - bin.gamma) / std::max(bin.gamma, 1e-300);
    report.max_relative_error = std::max(report.max_relative_error, bin.relative_error);
    report.bins.push_back(bin);
  }
  if (report.bins.empty()) {
    std::ostringstream msg;
    msg << "decay_report: no energy bin holds " << options.min_per_bin
        << " admissible eigenpairs (" << report.fits.size() << " fitted)";
    throw InsufficientDataError(msg.str());
  }
  return report;
}

MomentTrace evolve_moments(const FiniteBox& box, const TridiagonalEigen& spectrum, std::size_t site,
                           double p, double lower, double upper, std::span<const double> times,
                           const MomentOptions& options) {
  const std::size_t n = box.size();
  if (site < 1 || site > n) throw ConfigError("evolve_moments: initial site outside the box");
  // An empty window legitimately carries no vectors.
  if ((spectrum.count() > 0 && !spectrum.has_vectors()) || spectrum.n != n)
    throw ConfigError("evolve_moments: spectrum does not belong to this box");

  std::vector<std::size_t> modes;
  std::vector<double> weights;
  MomentTrace trace;
  trace.site = site;
  trace.p = p;
  trace.lower = lower;
  trace.upper = upper;
  for (std::size_t k = 0; k < spectrum.count(); ++k) {
    if (spectrum.values[k] < lower || spectrum.values[k] > upper) continue;
    modes.push_back(k);
    weights.push_back(spectrum.vector(k)[site - 1]);
    trace.initial_weight += weights.back() * weights.back();
  }

  std::vector<double> distance_power(n);
  for (std::size_t i = 0; i < n; ++i)
    distance_power[i] = std::pow(std::abs(static_cast<double>(i + 1) - static_cast<double>(site)), p);

  trace.times.assign(times.begin(), times.end());
  trace.moments.assign(times.size(), 0.0);
  trace.norms.assign(times.size(), 0.0);
  std::vector<double> boundary(times.size(), 0.0);
  const std::size_t layer = std::min(options.boundary_layer, n / 2);

  for_each_index(times.size(), options.exec, [&](std::size_t ti) {
    const double t = times[ti];
    std::vector<double> re(n, 0.0), im(n, 0.0);
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const double phase = -spectrum.values[modes[j]] * t;
      const double cr = weights[j] * std::cos(phase), ci = weights[j] * std::sin(phase);
      const auto phi = spectrum.vector(modes[j]);
      for (std::size_t i = 0; i < n; ++i) {
        re[i] += cr * phi[i];
        im[i] += ci * phi[i];
      }
    }
    double moment = 0.0, norm = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = re[i] * re[i] + im[i] * im[i];
      moment += distance_power[i] * w;
      norm += w;
      if (i < layer || i >= n - layer) edge += w;
    }
    trace.moments[ti] = moment;
    trace.norms[ti] = norm;
    boundary[ti] = edge;
  });

  for (double b : boundary)
    trace.max_boundary_weight =
        std::max(trace.max_boundary_weight, trace.initial_weight > 0 ? b / trace.initial_weight : 0.0);
  if (trace.max_boundary_weight > options.boundary_tolerance) {
    std::ostringstream msg;
    msg << "evolve_moments: boundary weight " << trace.max_boundary_weight << " exceeds "
        << options.boundary_tolerance << "; enlarge the box (N = " << n << ")";
    throw EnlargeBoxError(msg.str());
  }
  return trace;
}

double loglog_slope(std::span<const double> times, std::span<const double> values, double t_from) {
  if (times.size() != values.size()) throw ConfigError("loglog_slope: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_from && times[i] > 0 && values[i] > 0) {
      x.push_back(std::log(times[i]));
      y.push_back(std::log(values[i]));
    }
  }
  if (x.size() < 2) throw InsufficientDataError("loglog_slope: fewer than two usable times");
  return least_squares(x, y).slope;
}

double loglog_slope(const MomentTrace& trace, double t_from) {
  return loglog_slope(trace.times, trace.moments, t_from);
}

MomentEnsemble ensemble_moments(const WordModel& model, std::size_t box_size,
                                std::size_t realizations, std::size_t site, double p,
                                double lower, double upper, std::span<const double> times,
                                std::uint64_t seed, const MomentOptions& options) {
  if (realizations == 0) throw ConfigError("ensemble_moments: need at least one realization");
  MomentEnsemble out;
  out.times.assign(times.begin(), times.end());
  out.typical.assign(times.size(), 0.0);
  out.mean.assign(times.size(), 0.0);
  out.sup.assign(times.size(), 0.0);
  for (std::size_t r = 0; r < realizations; ++r) {
    const auto box = FiniteBox::sample(model, box_size, derive_seed(seed, {r}));
    const auto window = diagonalize_window(box, lower, upper);
    const auto trace = evolve_moments(box, window, site, p, lower, upper, times, options);
    if (!(trace.initial_weight > 0.0)) {
      ++out.skipped;
      continue;
    }
    double running = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double v = trace.moments[i] / trace.initial_weight;
      running = std::max(running, v);
      out.typical[i] += std::log(v);
      out.mean[i] += v;
      out.sup[i] = std::max(out.sup[i], running);
    }
    out.max_boundary_weight = std::max(out.max_boundary_weight, trace.max_boundary_weight);
    ++out.realizations;
  }
  if (out.realizations == 0)
    throw InsufficientDataError("ensemble_moments: the window carries no weight at the site");
  const double r = static_cast<double>(out.realizations);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.typical[i] = std::exp(out.typical[i] / r);
    out.mean[i] /= r;
  }
  return out;
}

double IdsCurve::operator()(double energy) const {
  if (energies.empty()) throw ConfigError("empty IDS curve");
  if (energy <= energies.front()) return energy < energies.front() ? 0.0 : mean.front();
  if (energy >= energies.back()) return 1.0;
  const auto it = std::upper_bound(energies.begin(), energies.end(), energy);
  const std::size_t i = static_cast<std::size_t>(it - energies.begin());
  const double t = (energy - energies[i - 1]) / (energies[i] - energies[i - 1]);
  return (1.0 - t) * mean[i - 1] + t * mean[i];
}

IdsCurve ids(const WordModel& model, std::size_t box_size, std::size_t realizations,
             std::span<const double> energies, std::uint64_t seed, Execution exec) {
  if (realizations == 0) throw ConfigError("ids needs at least one realization");
  if (!std::is_sorted(energies.begin(), energies.end()))
    throw ConfigError("ids energy grid must be ascending");
  std::vector<std::vector<double>> counts(realizations);
  for_each_index(realizations, exec, [&](std::size_t r) {
    const auto box = FiniteBox::sample(model, box_size, derive_seed(seed, {r}));
    const auto eig = eigh_tridiagonal(box.potential, box.off_diagonal(), false);
    auto& c = counts[r];
    c.resize(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
      const auto below = std::upper_bound(eig.values.begin(), eig.values.end(), energies[i]) -
                         eig.values.begin();
      c[i] = static_cast<double>(below) / static_cast<double>(box_size);
    }
  });
  IdsCurve out;
  out.energies.assign(energies.begin(), energies.end());
  out.mean.assign(energies.size(), 0.0);
  out.spread.assign(energies.size(), 0.0);
  out.realizations = realizations;
  out.box_size = box_size;
  const double R = static_cast<double>(realizations);
  for (std::size_t i = 0; i < energies.size(); ++i) {
    double s = 0.0;
    for (const auto& c : counts) s += c[i];
    out.mean[i] = s / R;
    double v = 0.0;
    for (const auto& c : counts) v += (c[i] - out.mean[i]) * (c[i] - out.mean[i]);
    out.spread[i] = realizations > 1 ? std::sqrt(v / (R - 1.0)) : 0.0;
  }
  return out;
}

double free_ids(double energy) {
  if (energy <= -2.0) return 0.0;
  if (energy >= 2.0) return 1.0;
  return 1.0 - std::acos(energy / 2.0) / std::numbers::pi;
}

double ids_log_potential(const IdsCurve& curve, double energy) {
  const auto& x = curve.energies;
  const auto& N = curve.mean;
  if (x.size() < 2) throw ConfigError("IDS curve needs at least two grid points");
  if (N.front() > 1e-12 || N.back() < 1.0 - 1e-12) {
    std::ostringstream msg;
    msg << "IDS grid must span the spectrum (N from " << N.front() << " to " << N.back() << ")";
    throw ConfigError(msg.str());
  }
  // F' = ln|u|
  auto F = [](double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double dN = N[i + 1] - N[i];
    if (dN == 0.0) continue;
    const double h = x[i + 1] - x[i];
    acc += dN / h * (F(x[i + 1] - energy) - F(x[i] - energy));
  }
  return acc;
}

ThoulessReport thouless_check(const EnergyCurve& gamma, const IdsCurve& curve,
                              std::span<const double> test_energies) {
  ThoulessReport rep;
  for (double e : test_energies) {
    if (!gamma.covers(e)) {
      std::ostringstream msg;
      msg << "thouless_check: gamma curve does not cover E = " << e;
      throw ConfigError(msg.str());
    }
    const double g = gamma(e);
    const double l = ids_log_potential(curve, e);
    rep.energies.push_back(e);
    rep.gamma.push_back(g);
    rep.log_potential.push_back(l);
    rep.residuals.push_back(std::abs(g - l));
    rep.max_residual = std::max(rep.max_residual, rep.residuals.back());
  }
  return rep;
}

}  // namespace randword
