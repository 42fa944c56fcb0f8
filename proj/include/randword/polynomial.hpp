#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "randword/matrix2.hpp"

namespace randword {

/// Real polynomial, coefficients in ascending degree. Trailing zeros are
/// trimmed so degree() is exact.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coefficients);
  explicit Polynomial(std::vector<double> coefficients);

  static Polynomial constant(double c) { return Polynomial{c}; }
  /// z - a
  static Polynomial linear(double a) { return Polynomial{-a, 1.0}; }

  /// Degree; the zero polynomial reports -1.
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double coefficient(std::size_t k) const {
    return k < coefficients_.size() ? coefficients_[k] : 0.0;
  }
  double leading() const { return coefficients_.empty() ? 0.0 : coefficients_.back(); }

  double operator()(double x) const;
  cplx operator()(cplx z) const;

  Polynomial derivative() const;

  /// All complex roots as eigenvalues of the companion matrix (LAPACK dgeev).
  std::vector<cplx> companion_roots() const;

  friend Polynomial operator+(const Polynomial& l, const Polynomial& r);
  friend Polynomial operator-(const Polynomial& l, const Polynomial& r);
  friend Polynomial operator*(const Polynomial& l, const Polynomial& r);
  friend Polynomial operator*(double s, const Polynomial& p);
  friend Polynomial operator-(const Polynomial& p) { return -1.0 * p; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> coefficients_;
};

/// Real roots of p (which must have only real roots, e.g. D(z) -/+ 2 of a
/// periodic Jacobi operator) with multiplicity, ascending. Companion-matrix
/// estimates are polished: simple roots by bisection on a sign change, double
/// roots by bisection on p'. Throws NumericError when a polished root still
/// has residual above `residual_tol`.
std::vector<double> real_roots(const Polynomial& p, double residual_tol = 1e-8);

/// Roots of p inside the open interval (lo, hi) only, found by bracketing on
/// a fine grid plus bisection. Used for roots of D inside one band.
std::vector<double> roots_in_interval(const Polynomial& p, double lo, double hi,
                                      std::size_t grid = 2001);

}  // namespace randword
