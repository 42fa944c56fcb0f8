#include <doctest.h>

#include <cmath>

#include "randword/transfer.hpp"
#include "support.hpp"

using namespace randword;

namespace {

// Per-site log growth along explicit potential values, written independently
// of the library accumulator: plain real products with rescaling by the
// max entry.
double growth_along(const std::vector<double>& v, double e) {
  double a = 1, b = 0, c = 0, d = 1, log_scale = 0;
  for (double x : v) {
    const double na = (e - x) * a - c, nb = (e - x) * b - d;
    c = a;
    d = b;
    a = na;
    b = nb;
    const double m = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (m > 1e50) {
      a /= m, b /= m, c /= m, d /= m;
      log_scale += std::log(m);
    }
  }
  const double norm = std::max(std::abs(a) + std::abs(b), std::abs(c) + std::abs(d));
  return (log_scale + std::log(norm)) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("site matrix") {
  const cplx z{0.3, -1.1};
  const auto t = site_matrix(0.0, z);
  CHECK(t.a == z);
  CHECK(t.b == cplx(-1));
  CHECK(t.c == cplx(1));
  CHECK(t.d == cplx(0));
  const auto at_z = site_matrix(1.7, cplx(1.7));
  CHECK(at_z == TransferMatrix2{0, -1, 1, 0});
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto m = site_matrix(rng.uniform(-3, 3), cplx(rng.uniform(-4, 4), rng.uniform(-4, 4)));
    CHECK(std::abs(m.det() - 1.0) < 1e-12);
  }
}

TEST_CASE("word matrix") {
  SUBCASE("lambda * (-1, 0, 1) at z = 0 is independent of lambda") {
    // T(lambda) T(0) T(-lambda) = [[0, 1], [-1, 0]] by hand.
    for (double lambda : {0.3, 1.0, 2.0}) {
      const auto m = word_matrix(scaled(Word{-1, 0, 1}, lambda), cplx(0));
      CHECK(distance(m, TransferMatrix2{0, 1, -1, 0}) < 1e-15);
    }
  }
  SUBCASE("single letter") {
    const cplx z{0.4, 0.2};
    CHECK(distance(word_matrix(Word{0.9}, z), site_matrix(0.9, z)) == 0.0);
  }
  SUBCASE("real and complex paths agree") {
    const Word w{0.2, -1.3, 0.7, 2.0};
    CHECK(distance(to_complex(word_matrix(w, 0.45)), word_matrix(w, cplx(0.45))) < 1e-13);
  }
}

TEST_CASE("property: concatenation is the matrix product") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto w1 = testgen::random_word(rng, 5, 2.0);
    const auto w2 = testgen::random_word(rng, 5, 2.0);
    const cplx z{rng.uniform(-3, 3), rng.uniform(-1, 1)};
    const auto lhs = word_matrix(concat_words(w1, w2), z);
    const auto rhs = word_matrix(w2, z) * word_matrix(w1, z);
    CHECK(distance(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("property: word matrices are unimodular") {
  // Entries grow like (|z| + K)^length and the absolute error of ad - bc
  // grows with their square, so words stop at length 5 for a 1e-10 bound.
  Rng rng(6);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto w = testgen::random_word(rng, 5, 2.0);
    cplx z;
    do z = cplx(rng.uniform(-4, 4), rng.uniform(-4, 4));
    while (std::abs(z) > 4.0);
    worst = std::max(worst, std::abs(word_matrix(w, z).det() - 1.0));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("gamma_0 golden values") {
  SUBCASE("single-site model built on (-1, 0, 1) vanishes at 0") {
    const auto m = single_site(Word{-1, 0, 1}, {0.3, 1.0, 2.0});
    const auto g = estimate_gamma0(m, cplx(0), 20000, 1);
    CHECK(std::abs(g.value) < 1e-2);
    CHECK(g.is_zero());
  }
  SUBCASE("dimer at E = lambda") {
    const auto g = estimate_gamma0(dimer(0.5), cplx(0.5), 200000, 2);
    CHECK(std::abs(g.value) < 1e-2);
  }
  SUBCASE("single atom: log of the spectral radius") {
    const Word w{0.3, -1.2};
    const double e = 2.7;
    const auto m = word_matrix(w, e);
    const double tr = std::abs(m.trace());
    REQUIRE(tr > 2.0);
    const double radius = (tr + std::sqrt(tr * tr - 4.0)) / 2.0;
    const auto g = estimate_gamma0(WordModel::atomic({{w, 1.0}}), cplx(e), 50000, 3);
    CHECK(g.value == doctest::Approx(std::log(radius)).epsilon(1e-3));
  }
}

TEST_CASE("gamma (per site)") {
  SUBCASE("m = 1: same as gamma_0") {
    const auto m = anderson({-1, 1});
    const auto g0 = estimate_gamma0(m, cplx(0.5), 200000, 10);
    const auto g = estimate_gamma(m, cplx(0.5), 200000, 11);
    CHECK(std::abs(g0.value - g.value) <= 3.0 * std::hypot(g0.std_error, g.std_error));
  }
  SUBCASE("dimer at E = 2 is positive") {
    const auto g = estimate_gamma(dimer(0.5), cplx(2.0), 200000, 12);
    CHECK(g.value > 5.0 * g.std_error);
  }
  SUBCASE("Bernoulli Anderson at E = 0.5 is positive") {
    const auto g = estimate_gamma(anderson({-1, 1}), cplx(0.5), 200000, 13);
    CHECK(g.value > 5.0 * g.std_error);
  }
  SUBCASE("independent oracle on an explicit path") {
    const auto m = WordModel::atomic({{Word{1}, 0.5}, {Word{-1, -1}, 0.5}});
    const std::size_t n = 100000;
    const auto g = estimate_gamma(m, cplx(0.3), n, 14);
    PotentialStream stream(m, 14);
    std::vector<double> v(n);
    for (auto& x : v) x = stream.next();
    CHECK(g.value == doctest::Approx(growth_along(v, 0.3)).epsilon(1e-6));
  }
}

TEST_CASE("length identity gamma_0 = <L> gamma") {
  SUBCASE("dimer lambda = 1.5 at 0") {
    const auto r = verify_length_identity(dimer(1.5), cplx(0), 400000, 21);
    CHECK(r.pass);
    CHECK_FALSE(r.vacuous);
    CHECK(r.ratio == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("Anderson ratio 1") {
    const auto r = verify_length_identity(anderson({-1, 1}), cplx(0.5), 200000, 22);
    CHECK(r.pass);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("vacuous at a zero of both") {
    const auto r = verify_length_identity(single_site(Word{-1, 0, 1}, {0.5, 1.0}), cplx(0), 30000, 23);
    CHECK(r.pass);
    CHECK(r.vacuous);
  }
}

TEST_CASE("renormalization period does not matter") {
  const auto m = dimer(1.0);
  LyapunovOptions a, b;
  a.renormalize_every = 10;
  b.renormalize_every = 100;
  const auto ga = estimate_gamma0(m, cplx(1.7), 100000, 31, a);
  const auto gb = estimate_gamma0(m, cplx(1.7), 100000, 31, b);
  CHECK(std::abs(ga.value - gb.value) <= std::hypot(ga.std_error, gb.std_error));
  const auto sa = estimate_gamma(m, cplx(0.2, 0.1), 100000, 32, a);
  const auto sb = estimate_gamma(m, cplx(0.2, 0.1), 100000, 32, b);
  CHECK(std::abs(sa.value - sb.value) <= std::hypot(sa.std_error, sb.std_error));
}

TEST_CASE("property: gamma does not depend on the anchor offset") {
  // Paths whose origin sits at offset 1 against paths at offset 2 of a
  // length-2 word; eight independent paths of 40000 sites in each class.
  const auto m = WordModel::atomic({{Word{0.8}, 0.5}, {Word{-0.8, -0.8}, 0.5}});
  const double e = 0.9;
  std::vector<double> by_offset[3];
  for (std::uint64_t s = 0; by_offset[1].size() < 8 || by_offset[2].size() < 8; ++s) {
    const auto w = sample_potential(m, s, 1, 40000);
    if (w.anchor_length != 2 || by_offset[w.anchor_offset].size() >= 8) continue;
    by_offset[w.anchor_offset].push_back(growth_along(w.values, e));
  }
  auto mean_se = [](const std::vector<double>& x) {
    double mu = 0, var = 0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(x.size());
    for (double v : x) var += (v - mu) * (v - mu);
    var /= static_cast<double>(x.size() - 1);
    return std::pair{mu, std::sqrt(var / static_cast<double>(x.size()))};
  };
  const auto [m1, s1] = mean_se(by_offset[1]);
  const auto [m2, s2] = mean_se(by_offset[2]);
  CHECK(m1 > 0.0);
  CHECK(std::abs(m1 - m2) <= 3.0 * std::hypot(s1, s2) + 1e-12);
}

TEST_CASE("estimates are nonnegative within error") {
  Rng rng(40);
  for (int i = 0; i < 20; ++i) {
    const auto m = testgen::random_model(rng, 2, 3, 1.5);
    const cplx z{rng.uniform(-3.5, 3.5), 0.0};
    const auto g = estimate_gamma(m, z, 20000, 100 + static_cast<std::uint64_t>(i));
    CHECK(g.value >= -3.0 * g.std_error);
  }
}

TEST_CASE("parallel sweep is bitwise identical to the serial one") {
  const auto m = dimer(0.5);
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(-2.4 + 0.3 * i);
  const auto par = gamma_sweep(m, grid, 5000, 77, Execution::Parallel);
  const auto ser = gamma_sweep(m, grid, 5000, 77, Execution::Serial);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(par[i].value == ser[i].value);
    CHECK(par[i].std_error == ser[i].std_error);
  }
}
