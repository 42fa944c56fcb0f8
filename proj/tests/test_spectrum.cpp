#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "randword/errors.hpp"
#include "randword/spectrum.hpp"
#include "randword/transfer.hpp"
#include "support.hpp"

using namespace randword;

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// exp(-i t H) delta_site by a Taylor series over short steps, without any
// eigendecomposition.
std::vector<std::complex<double>> taylor_evolve(const FiniteBox& box, std::size_t site, double t) {
  const std::size_t n = box.size();
  std::vector<std::complex<double>> psi(n, 0.0);
  psi[site - 1] = 1.0;
  auto apply_h = [&](const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = box.potential[i] * x[i];
      if (i > 0) y[i] += x[i - 1];
      if (i + 1 < n) y[i] += x[i + 1];
    }
    return y;
  };
  const int steps = static_cast<int>(std::ceil(t / 0.05));
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    auto term = psi;
    auto sum = psi;
    for (int k = 1; k <= 30; ++k) {
      term = apply_h(term);
      for (auto& x : term) x *= std::complex<double>(0.0, -dt) / static_cast<double>(k);
      for (std::size_t i = 0; i < n; ++i) sum[i] += term[i];
    }
    psi = std::move(sum);
  }
  return psi;
}

IdsCurve free_ids_curve(double lo, double hi, std::size_t points) {
  IdsCurve c;
  for (std::size_t i = 0; i < points; ++i) {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    c.energies.push_back(e);
    c.mean.push_back(free_ids(e));
    c.spread.push_back(0.0);
  }
  c.realizations = 1;
  return c;
}

}  // namespace

TEST_CASE("free box eigenvalues") {
  const std::size_t n = 200;
  const auto eig = diagonalize(FiniteBox::free(n));
  REQUIRE(eig.count() == n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double exact = 2.0 * std::cos(static_cast<double>(n + 1 - k) * std::numbers::pi /
                                        static_cast<double>(n + 1));
    CHECK(eig.values[k - 1] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("dimer box: residuals, norms, orthogonality") {
  const auto box = FiniteBox::sample(dimer(0.5), 500, 3);
  const auto eig = diagonalize(box);
  double worst_res = 0, worst_norm = 0, worst_dot = 0;
  for (std::size_t i = 0; i < eig.count(); ++i) {
    worst_res = std::max(worst_res, eigen_residual(box, eig.values[i], eig.vector(i)));
    worst_norm = std::max(worst_norm, std::abs(dot(eig.vector(i), eig.vector(i)) - 1.0));
    for (std::size_t j = 0; j < i; ++j)
      worst_dot = std::max(worst_dot, std::abs(dot(eig.vector(i), eig.vector(j))));
  }
  CHECK(worst_res < 1e-8);
  CHECK(worst_norm < 1e-10);
  CHECK(worst_dot < 1e-8);
  for (std::size_t i = 1; i < eig.count(); ++i) CHECK(eig.values[i] >= eig.values[i - 1]);
}

TEST_CASE("LAPACK agrees with the QL reference") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    FiniteBox box;
    box.potential.resize(150);
    for (auto& v : box.potential) v = rng.uniform(-2, 2);
    const auto fast = diagonalize(box);
    const auto ref = diagonalize(box, Eigensolver::QlReference);
    REQUIRE(fast.count() == ref.count());
    for (std::size_t i = 0; i < fast.count(); ++i) {
      CHECK(std::abs(fast.values[i] - ref.values[i]) < 1e-10);
      // Same vector up to sign (the spectrum of a Jacobi matrix is simple).
      CHECK(std::abs(std::abs(dot(fast.vector(i), ref.vector(i))) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("windowed decomposition and Sturm counts") {
  const auto box = FiniteBox::sample(anderson({-1, 1}), 400, 5);
  const auto full = diagonalize(box);
  const double lo = -0.7, hi = 1.2;
  const auto win = diagonalize_window(box, lo, hi);
  std::vector<double> expected;
  for (double e : full.values)
    if (e >= lo && e <= hi) expected.push_back(e);
  REQUIRE(win.count() == expected.size());
  for (std::size_t i = 0; i < win.count(); ++i) {
    CHECK(std::abs(win.values[i] - expected[i]) < 1e-10);
    CHECK(eigen_residual(box, win.values[i], win.vector(i)) < 1e-8);
  }
  const auto off = box.off_diagonal();
  for (double x : {-2.5, -1.0, 0.0, 0.3, 2.9}) {
    const auto below = static_cast<std::size_t>(
        std::count_if(full.values.begin(), full.values.end(), [&](double e) { return e < x; }));
    CHECK(count_below(box.potential, off, x) == below);
  }
}

TEST_CASE("eigenfunction decay") {
  SUBCASE("free box: extended states") {
    const auto box = FiniteBox::free(2000);
    const auto eig = diagonalize(box);
    const EnergyCurve zero{{-3.0, 3.0}, {0.0, 0.0}};
    const auto rep = decay_report(box, eig, zero, {});
    REQUIRE(rep.fits.size() > 100);
    std::vector<double> rates;
    for (const auto& f : rep.fits) rates.push_back(f.rate());
    CHECK(median(rates) < 0.02);
  }
  SUBCASE("Bernoulli Anderson: every bin decays") {
    const auto model = anderson({-1, 1});
    const auto box = FiniteBox::sample(model, 2000, 6);
    const auto eig = diagonalize(box);
    EnergyCurve gamma;
    for (double e = -3.2; e <= 3.21; e += 0.1) gamma.energies.push_back(e);
    for (const auto& g : gamma_sweep(model, gamma.energies, 50000, 7)) gamma.values.push_back(g.value);
    const auto rep = decay_report(box, eig, gamma, {});
    REQUIRE(!rep.bins.empty());
    for (const auto& b : rep.bins) {
      CAPTURE(b.lower);
      CHECK(b.median_rate > 0.0);
    }
  }
  SUBCASE("reflection covariance") {
    const auto box = FiniteBox::sample(anderson({-1, 1}), 600, 8);
    const auto rev = box.reversed();
    const auto eig = diagonalize(box);
    const std::size_t n = box.size();
    int checked = 0;
    for (std::size_t k = 100; k < eig.count() && checked < 10; k += 47) {
      const auto psi = eig.vector(k);
      std::size_t peak = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
      if (peak < 150 || peak > n - 150) continue;
      const std::size_t p1 = peak + 1, p2 = n - peak;
      const auto f = fit_decay(log_envelope(box, eig.values[k], p1), p1, 10, 10);
      const auto g = fit_decay(log_envelope(rev, eig.values[k], p2), p2, 10, 10);
      REQUIRE(f.has_left);
      REQUIRE(f.has_right);
      CHECK(std::abs(f.left_rate - g.right_rate) < 1e-3);
      CHECK(std::abs(f.right_rate - g.left_rate) < 1e-3);
      ++checked;
    }
    CHECK(checked > 3);
  }
  SUBCASE("too few eigenpairs") {
    const auto box = FiniteBox::free(40);
    const EnergyCurve zero{{-3.0, 3.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(decay_report(box, diagonalize(box), zero, {}), InsufficientDataError);
  }
}

TEST_CASE("free ballistic moments") {
  // On Z, sum_n n^2 J_n(2t)^2 = 2 t^2.
  const std::size_t n = 2000, site = 1000;
  const auto box = FiniteBox::free(n);
  const auto eig = diagonalize(box);
  std::vector<double> times;
  for (double t = 10; t <= 300; t *= 1.2) times.push_back(t);
  const auto tr = evolve_moments(box, eig, site, 2.0, -3.0, 3.0, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(tr.moments[i] == doctest::Approx(2.0 * times[i] * times[i]).epsilon(1e-8));
  const double slope = loglog_slope(tr, 10.0);
  CHECK(std::abs(slope - 2.0) < 0.1);
  CHECK(tr.max_boundary_weight < 1e-6);
}

TEST_CASE("moments against direct evolution") {
  const std::size_t n = 81, site = 41;
  const auto box = FiniteBox::sample(dimer(0.5), n, 9);
  const auto eig = diagonalize(box);
  const std::vector<double> times{0.5, 1.0, 2.0, 4.0};
  for (double p : {1.0, 2.0, 3.0}) {
    const auto tr = evolve_moments(box, eig, site, p, -10.0, 10.0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto psi = taylor_evolve(box, site, times[i]);
      double m = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        m += std::pow(std::abs(static_cast<double>(j + 1) - static_cast<double>(site)), p) *
             std::norm(psi[j]);
      CHECK(tr.moments[i] == doctest::Approx(m).epsilon(1e-9));
    }
  }
}

TEST_CASE("projected evolution invariants") {
  const auto box = FiniteBox::sample(dimer(0.5), 600, 10);
  const auto eig = diagonalize(box);
  const double lo = 1.2, hi = 1.7;
  const std::size_t site = 300;
  std::vector<double> times{0.0, 1.0, 10.0, 100.0};
  const auto tr = evolve_moments(box, eig, site, 2.0, lo, hi, times);
  for (double w : tr.norms) CHECK(std::abs(w - tr.initial_weight) < 1e-10);
  for (double m : tr.moments) CHECK(m >= 0.0);

  // t = 0: the moment of P_I delta itself.
  std::vector<double> phi(box.size(), 0.0);
  double weight = 0.0;
  for (std::size_t k = 0; k < eig.count(); ++k) {
    if (eig.values[k] < lo || eig.values[k] > hi) continue;
    const auto v = eig.vector(k);
    weight += v[site - 1] * v[site - 1];
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] += v[site - 1] * v[j];
  }
  double m0 = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const double d = static_cast<double>(j + 1) - static_cast<double>(site);
    m0 += d * d * phi[j] * phi[j];
  }
  CHECK(tr.initial_weight == doctest::Approx(weight).epsilon(1e-12));
  CHECK(tr.moments[0] == doctest::Approx(m0).epsilon(1e-10));

  const auto flat = evolve_moments(box, eig, site, 0.0, lo, hi, times);
  for (double m : flat.moments) CHECK(std::abs(m - flat.initial_weight) < 1e-10);

  MomentOptions serial;
  serial.exec = Execution::Serial;
  const auto ser = evolve_moments(box, eig, site, 2.0, lo, hi, times, serial);
  CHECK(ser.moments == tr.moments);

  const std::vector<double> late{50.0};
  CHECK_THROWS_AS(evolve_moments(FiniteBox::free(60), diagonalize(FiniteBox::free(60)), 30, 2.0,
                                 -3.0, 3.0, late),
                  EnlargeBoxError);
}

TEST_CASE("moment ensembles") {
  std::vector<double> times{1.0, 10.0, 100.0};
  const auto a = ensemble_moments(dimer(0.5), 1000, 6, 500, 2.0, 1.35, 1.45, times, 11);
  const auto b = ensemble_moments(dimer(0.5), 1000, 6, 500, 2.0, 1.35, 1.45, times, 11);
  CHECK(a.typical == b.typical);
  CHECK(a.realizations + a.skipped == 6);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(a.typical[i] <= a.mean[i] * (1 + 1e-12));
    CHECK(a.mean[i] <= a.sup[i] * (1 + 1e-12));
    if (i > 0) CHECK(a.sup[i] >= a.sup[i - 1]);
  }
  // A window outside the spectrum leaves nothing to evolve.
  CHECK_THROWS_AS(ensemble_moments(dimer(0.5), 200, 3, 100, 2.0, 5.0, 6.0, times, 1),
                  InsufficientDataError);
}

TEST_CASE("integrated density of states") {
  std::vector<double> grid;
  for (double e = -3.5; e <= 3.51; e += 0.1) grid.push_back(e);
  SUBCASE("free box matches the dispersion relation") {
    const std::size_t n = 400;
    const auto c = ids(WordModel::atomic({{Word{0.0}, 1.0}}), n, 1, grid, 1);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(c.mean[i] - free_ids(grid[i])) <= 2.0 / static_cast<double>(n));
  }
  SUBCASE("monotone from 0 to 1, disjoint seed sets agree") {
    const auto model = anderson({-1, 1});
    const auto a = ids(model, 500, 20, grid, 100);
    const auto b = ids(model, 500, 20, grid, 200);
    CHECK(a.mean.front() == 0.0);
    CHECK(a.mean.back() == 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i > 0) CHECK(a.mean[i] >= a.mean[i - 1]);
      // Means of 20 samples: compare against 3 combined standard errors.
      const double se = std::hypot(a.spread[i], b.spread[i]) / std::sqrt(20.0);
      CHECK(std::abs(a.mean[i] - b.mean[i]) <= 3.0 * se + 1e-12);
    }
  }
  SUBCASE("serial and parallel averages are identical") {
    const auto model = dimer(0.5);
    const auto par = ids(model, 300, 8, grid, 3, Execution::Parallel);
    const auto ser = ids(model, 300, 8, grid, 3, Execution::Serial);
    CHECK(par.mean == ser.mean);
    CHECK(par.spread == ser.spread);
  }
  SUBCASE("anchor offset does not matter") {
    // Boxes whose first site is the first or the second letter of a length-2 word.
    const auto model = WordModel::atomic({{Word{1.0}, 0.5}, {Word{-1.0, -1.0}, 0.5}});
    const std::size_t n = 300, per_class = 30;
    std::vector<std::vector<double>> counts[3];
    for (std::uint64_t s = 0; counts[1].size() < per_class || counts[2].size() < per_class; ++s) {
      const auto w = sample_potential(model, s, 1, static_cast<std::int64_t>(n));
      if (w.anchor_length != 2 || counts[w.anchor_offset].size() >= per_class) continue;
      const std::vector<double> off(n - 1, 1.0);
      std::vector<double> row;
      for (double e : grid)
        row.push_back(static_cast<double>(count_below(w.values, off, e)) / static_cast<double>(n));
      counts[w.anchor_offset].push_back(row);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double mean[3] = {}, var[3] = {};
      for (int k : {1, 2}) {
        for (const auto& r : counts[k]) mean[k] += r[i] / per_class;
        for (const auto& r : counts[k]) var[k] += (r[i] - mean[k]) * (r[i] - mean[k]) / (per_class - 1);
      }
      const double se = std::sqrt((var[1] + var[2]) / per_class);
      CHECK(std::abs(mean[1] - mean[2]) <= 3.0 * se + 1.0 / static_cast<double>(n));
    }
  }
}

TEST_CASE("Thouless formula") {
  SUBCASE("free IDS: zero on the band, arccosh(|E|/2) outside") {
    const auto c = free_ids_curve(-2.5, 2.5, 5001);
    for (double e : {-1.5, -0.3, 0.7, 1.6}) CHECK(std::abs(ids_log_potential(c, e)) < 1e-2);
    for (double e : {-4.0, 2.5, 3.0, 10.0}) {
      CHECK(ids_log_potential(c, e) == doctest::Approx(std::acosh(std::abs(e) / 2.0)).epsilon(1e-3));
    }
    CHECK(ids_log_potential(c, 10.0) / std::log(10.0) == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("free gamma and IDS are consistent") {
    const auto c = free_ids_curve(-2.5, 2.5, 5001);
    const EnergyCurve gamma{{-3.0, 3.0}, {0.0, 0.0}};
    const std::vector<double> test{-1.0, 0.0, 1.0};
    const auto rep = thouless_check(gamma, c, test);
    CHECK(rep.max_residual < 1e-2);
  }
  SUBCASE("grid mismatches are configuration errors") {
    const auto partial = free_ids_curve(-1.0, 1.0, 101);
    const EnergyCurve gamma{{-3.0, 3.0}, {0.0, 0.0}};
    const std::vector<double> test{0.0};
    CHECK_THROWS_AS(thouless_check(gamma, partial, test), ConfigError);
    const auto c = free_ids_curve(-2.5, 2.5, 101);
    const EnergyCurve narrow{{-0.5, 0.5}, {0.0, 0.0}};
    const std::vector<double> outside{1.0};
    CHECK_THROWS_AS(thouless_check(narrow, c, outside), ConfigError);
  }
}
