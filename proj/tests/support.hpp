#pragma once

// Hand-rolled generators for the property tests. Every generator takes an
// explicit Rng so a failing case can be replayed from its seed.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "randword/rng.hpp"
#include "randword/word_model.hpp"

namespace testgen {

inline randword::Word random_word(randword::Rng& rng, std::size_t max_length, double bound) {
  const std::size_t len = 1 + rng.below(max_length);
  std::vector<double> v(len);
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return randword::Word(std::move(v));
}

/// Random probability vector of the given size with every entry positive.
inline std::vector<double> random_simplex(randword::Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = 0.05 + rng.uniform();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  // Push the rounding residue into the largest entry so the sum is exact to 1e-15.
  double rest = 1.0;
  for (std::size_t i = 1; i < n; ++i) rest -= w[i];
  w[0] = rest;
  return w;
}

/// Length weights nu_1..nu_m with zeros sprinkled in but nu_m > 0.
inline std::vector<double> random_length_weights(randword::Rng& rng, std::size_t m) {
  std::vector<double> w(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    if (j + 1 == m || rng.uniform() < 0.6) w[j] = 0.05 + rng.uniform();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

inline randword::WordModel random_model(randword::Rng& rng, std::size_t atoms, std::size_t max_length,
                                        double bound) {
  const auto weights = random_simplex(rng, atoms);
  std::vector<randword::Atom> list;
  for (std::size_t i = 0; i < atoms; ++i) list.push_back({random_word(rng, max_length, bound), weights[i]});
  return randword::WordModel::atomic(list);
}

}  // namespace testgen
