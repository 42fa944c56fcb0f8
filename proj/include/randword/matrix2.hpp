#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>

namespace randword {

using cplx = std::complex<double>;

template <class T>
struct Vec2 {
  T first{};
  T second{};
};

/// 2x2 matrix [[a, b], [c, d]] over double or std::complex<double>.
template <class T>
struct Mat2 {
  T a{1}, b{0}, c{0}, d{1};

  static constexpr Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }

  T det() const { return a * d - b * c; }
  T trace() const { return a + d; }

  /// Row-sum (infinity) norm; submultiplicative.
  double norm() const {
    return std::max(std::abs(a) + std::abs(b), std::abs(c) + std::abs(d));
  }

  /// Largest entry modulus; used for entrywise comparisons.
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }

  /// Inverse assuming unit determinant.
  Mat2 unimodular_inverse() const { return {d, -b, -c, a}; }

  Mat2 inverse() const {
    const T det_ = det();
    return {d / det_, -b / det_, -c / det_, a / det_};
  }

  Mat2& operator*=(const Mat2& rhs) { return *this = *this * rhs; }
  Mat2& operator*=(T s) {
    a *= s;
    b *= s;
    c *= s;
    d *= s;
    return *this;
  }

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
  }
  friend Mat2 operator+(const Mat2& l, const Mat2& r) {
    return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d};
  }
  friend Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
  }
  friend Mat2 operator*(T s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  friend Vec2<T> operator*(const Mat2& m, const Vec2<T>& v) {
    return {m.a * v.first + m.b * v.second, m.c * v.first + m.d * v.second};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
  }
};

/// Site/word transfer matrix; unimodular by construction.
using TransferMatrix2 = Mat2<cplx>;
using RealMatrix2 = Mat2<double>;

inline RealMatrix2 real_part(const TransferMatrix2& m) {
  return {m.a.real(), m.b.real(), m.c.real(), m.d.real()};
}

inline TransferMatrix2 to_complex(const RealMatrix2& m) { return {m.a, m.b, m.c, m.d}; }

/// Entrywise distance.
template <class T>
double distance(const Mat2<T>& x, const Mat2<T>& y) {
  return (x - y).max_abs();
}

}  // namespace randword
