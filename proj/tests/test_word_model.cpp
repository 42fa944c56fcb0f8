#include <doctest.h>

#include <cmath>
#include <map>

#include "randword/errors.hpp"
#include "randword/word_model.hpp"
#include "support.hpp"

using namespace randword;

TEST_CASE("concatenation") {
  CHECK(concat_words(Word{1}, Word{2}) == Word{1, 2});
  const Word plus{1, 1}, minus{-1, -1};
  CHECK(concat_words(plus, minus) == Word{1, 1, -1, -1});
  CHECK(concat_words(plus, minus) != concat_words(minus, plus));
  const Word a{0.7};
  CHECK(concat_words(a, a) == Word{0.7, 0.7});
  CHECK(concat_words(a, a).length() == 2);
}

TEST_CASE("non-commutation condition") {
  SUBCASE("dimer holds") {
    const auto r = check_nc(dimer(0.5));
    CHECK(r.holds);
    REQUIRE(r.witness);
    CHECK(words_do_not_commute(r.witness->first, r.witness->second));
  }
  SUBCASE("singleton fails") { CHECK_FALSE(check_nc(anderson({0.3})).holds); }
  SUBCASE("powers of one letter commute") {
    const auto m = WordModel::atomic({{Word{1, 1}, 0.5}, {Word{1, 1, 1}, 0.5}});
    CHECK_FALSE(check_nc(m).holds);
  }
  SUBCASE("sampler-backed models are refused") {
    CHECK_THROWS_AS(check_nc(anderson_uniform(-1, 1)), UnsupportedModeError);
  }
}

TEST_CASE("expected length") {
  CHECK(expected_length(dimer(0.5)) == doctest::Approx(2.0));
  const auto mixed = WordModel::atomic({{Word{1}, 0.5}, {Word{-1, -1}, 0.5}});
  CHECK(expected_length(mixed) == doctest::Approx(1.5));
  CHECK(expected_length(anderson({-1, 1})) == doctest::Approx(1.0));
}

TEST_CASE("weights are validated, not renormalized") {
  CHECK_THROWS_AS(WordModel::atomic({{Word{1}, 0.5}, {Word{2}, 0.4}}), ConfigError);
  CHECK_THROWS_AS(WordModel::atomic({{Word{1}, 1.2}, {Word{2}, -0.2}}), ConfigError);
  CHECK_NOTHROW(WordModel::atomic({{Word{1}, 0.5}, {Word{2}, 0.5 + 1e-14}}));
  CHECK_THROWS_AS(WordModel::atomic({{Word{3}, 1.0}}, std::nullopt, 2.0), ConfigError);
}

TEST_CASE("example constructors") {
  SUBCASE("dimer") {
    const auto m = dimer(0.5);
    REQUIRE(m.atoms().size() == 2);
    CHECK(m.atoms()[0].word == Word{0.5, 0.5});
    CHECK(m.atoms()[1].word == Word{-0.5, -0.5});
    CHECK(m.atoms()[0].weight == doctest::Approx(0.5));
    CHECK(m.atoms()[1].weight == doctest::Approx(0.5));
    CHECK_THROWS_AS(dimer(-1.0), ConfigError);
  }
  SUBCASE("displacement") {
    const auto m = displacement(Word{1}, 3);
    REQUIRE(m.atoms().size() == 3);
    CHECK(m.atoms()[0].word == Word{1, 0, 0});
    CHECK(m.atoms()[1].word == Word{0, 1, 0});
    CHECK(m.atoms()[2].word == Word{0, 0, 1});
    CHECK_THROWS_AS(displacement(Word{1, 2, 3}, 3), ConfigError);
  }
  SUBCASE("single site") {
    const Word w{-1, 0, 1};
    const auto m = single_site(w, {0.5, 1.0});
    REQUIRE(m.atoms().size() == 2);
    CHECK(m.atoms()[0].word == scaled(w, 0.5));
    CHECK(m.atoms()[1].word == w);
  }
  SUBCASE("catalogue lists five constructors") {
    const auto cat = example_catalogue();
    CHECK(cat.size() == 5);
    for (const auto& [name, _] : cat) CHECK_NOTHROW(parse_example_kind(name));
    CHECK_THROWS_AS(parse_example_kind("quasicrystal"), ConfigError);
  }
}

TEST_CASE("potential sampling") {
  SUBCASE("deterministic") {
    const auto m = dimer(0.5);
    const auto a = sample_potential(m, 99, -20, 40);
    const auto b = sample_potential(m, 99, -20, 40);
    CHECK(a.values == b.values);
    CHECK(a.anchor_offset == b.anchor_offset);
  }
  SUBCASE("m = 1 gives an anchor (1, 1) and i.i.d. values") {
    const auto m = anderson({-1, 1});
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto w = sample_potential(m, s, -5, 5);
      CHECK(w.anchor_length == 1);
      CHECK(w.anchor_offset == 1);
    }
  }
  SUBCASE("sites n >= 1 do not depend on the left end of the window") {
    const auto m = WordModel::atomic({{Word{1}, 0.5}, {Word{-1, -1}, 0.5}});
    const auto a = sample_potential(m, 5, -3, 30);
    const auto b = sample_potential(m, 5, -40, 30);
    for (std::int64_t n = 1; n <= 30; ++n) CHECK(a.at(n) == b.at(n));
  }
  SUBCASE("stream agrees with the window") {
    const auto m = WordModel::atomic({{Word{1}, 0.3}, {Word{-1, 2}, 0.3}, {Word{0, 0, 3}, 0.4}});
    const auto w = sample_potential(m, 17, 0, 60);
    PotentialStream stream(m, 17);
    for (std::int64_t n = 1; n <= 60; ++n) CHECK(stream.next() == w.at(n));
  }
}

TEST_CASE("anchor length follows the size-biased law") {
  // Exact cylinder measure: P(|omega_0| = j) = j nu_j / <L>. Chi-square over 1e5 draws.
  const auto m = WordModel::atomic({{Word{1}, 0.5}, {Word{-1, -1}, 0.25}, {Word{2, 2, 2}, 0.25}});
  const double mean = 0.5 + 0.5 + 0.75;
  const std::vector<double> expected = {0.5 / mean, 0.5 / mean, 0.75 / mean};
  const std::size_t n = 100000;
  std::vector<double> counts(3, 0.0);
  Rng rng(2024);
  for (std::size_t i = 0; i < n; ++i) counts[m.draw_biased_length(rng) - 1] += 1.0;
  double chi2 = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double e = expected[j] * static_cast<double>(n);
    chi2 += (counts[j] - e) * (counts[j] - e) / e;
  }
  // Two degrees of freedom: mean 2, sd 2.
  CHECK(chi2 < 2.0 + 3.0 * 2.0);

  const auto half = WordModel::atomic({{Word{1}, 0.5}, {Word{-1, -1}, 0.5}});
  std::size_t twos = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) twos += sample_potential(half, s, 0, 1).anchor_length == 2;
  const double freq = static_cast<double>(twos) / 20000.0;
  const double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / 20000.0);
  CHECK(std::abs(freq - 2.0 / 3.0) < 3.0 * sigma);
}

TEST_CASE("single-length models give periodic streams with uniform offset") {
  const std::size_t ell = 3;
  const auto m = WordModel::atomic({{Word{1, 2, 3}, 0.5}, {Word{4, 5, 6}, 0.5}});
  std::map<std::size_t, std::size_t> offsets;
  const std::size_t samples = 30000;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto w = sample_potential(m, s, 1, 12);
    ++offsets[w.anchor_offset];
    // Word boundaries every ell sites.
    for (std::size_t i = 1; i < w.word_starts.size(); ++i)
      CHECK(w.word_starts[i] - w.word_starts[i - 1] == static_cast<std::int64_t>(ell));
  }
  CHECK(offsets.size() == ell);
  const double p = 1.0 / 3.0, sigma = std::sqrt(p * (1 - p) / samples);
  for (const auto& [k, c] : offsets)
    CHECK(std::abs(static_cast<double>(c) / samples - p) < 3.0 * sigma);
}

TEST_CASE("property: random atomic models are normalized with <L> in [1, m]") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = testgen::random_model(rng, 1 + rng.below(5), 1 + rng.below(6), 3.0);
    double sum = 0.0;
    for (const auto& a : m.atoms()) sum += a.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.expected_length() >= 1.0);
    CHECK(m.expected_length() <= static_cast<double>(m.max_length()));
  }
}

TEST_CASE("property: check_nc is symmetric and fails on singletons") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto w0 = testgen::random_word(rng, 4, 2.0);
    const auto w1 = rng.uniform() < 0.3 ? w0 : testgen::random_word(rng, 4, 2.0);
    CHECK(words_do_not_commute(w0, w1) == words_do_not_commute(w1, w0));
    CHECK_FALSE(words_do_not_commute(w0, w0));
    CHECK_FALSE(check_nc(WordModel::atomic({{w0, 1.0}})).holds);
    const auto both = check_nc(WordModel::atomic({{w0, 0.5}, {w1, 0.5}}));
    CHECK(both.holds == words_do_not_commute(w0, w1));
  }
}
