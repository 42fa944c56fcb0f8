#include "randword/polynomial.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "randword/errors.hpp"

namespace randword {

Polynomial::Polynomial(std::initializer_list<double> coefficients)
    : coefficients_(coefficients) {
  trim();
}

Polynomial::Polynomial(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  trim();
}

void Polynomial::trim() {
  while (!coefficients_.empty() && coefficients_.back() == 0.0) coefficients_.pop_back();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coefficients_.size() <= 1) return {};
  std::vector<double> out(coefficients_.size() - 1);
  for (std::size_t k = 1; k < coefficients_.size(); ++k)
    out[k - 1] = static_cast<double>(k) * coefficients_[k];
  return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& l, const Polynomial& r) {
  std::vector<double> out(std::max(l.coefficients_.size(), r.coefficients_.size()), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = l.coefficient(k) + r.coefficient(k);
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& l, const Polynomial& r) { return l + (-1.0) * r; }

Polynomial operator*(const Polynomial& l, const Polynomial& r) {
  if (l.coefficients_.empty() || r.coefficients_.empty()) return {};
  std::vector<double> out(l.coefficients_.size() + r.coefficients_.size() - 1, 0.0);
  for (std::size_t i = 0; i < l.coefficients_.size(); ++i)
    for (std::size_t j = 0; j < r.coefficients_.size(); ++j)
      out[i + j] += l.coefficients_[i] * r.coefficients_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> out = p.coefficients_;
  for (auto& c : out) c *= s;
  return Polynomial(std::move(out));
}

std::vector<cplx> Polynomial::companion_roots() const {
  const int n = degree();
  if (n < 1) return {};
  if (n == 1) return {cplx(-coefficients_[0] / coefficients_[1], 0.0)};

  // Column-major companion matrix of the monic polynomial.
  std::vector<double> companion(static_cast<std::size_t>(n) * n, 0.0);
  const double lead = leading();
  for (int i = 1; i < n; ++i) companion[static_cast<std::size_t>(i - 1) * n + i] = 1.0;
  for (int i = 0; i < n; ++i)
    companion[static_cast<std::size_t>(n - 1) * n + i] = -coefficients_[i] / lead;

  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, companion.data(), n,
                                        wr.data(), wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "companion eigenvalue solver failed (info=" << info << ")";
    throw NumericError(msg.str());
  }
  std::vector<cplx> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = {wr[i], wi[i]};
  return roots;
}

namespace {

double magnitude_scale(const Polynomial& p, double x) {
  double acc = 0.0, power = 1.0;
  for (double c : p.coefficients()) {
    acc += std::abs(c) * power;
    power *= std::abs(x);
  }
  return std::max(acc, 1.0);
}

/// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Expands a bracket around x until q changes sign, without crossing the
/// limits. Returns false when no sign change is found.
bool find_bracket(const Polynomial& q, double x, double left_limit, double right_limit,
                  double& lo, double& hi) {
  double h = 1e-10 * std::max(1.0, std::abs(x));
  for (int it = 0; it < 80; ++it) {
    lo = std::max(x - h, left_limit);
    hi = std::min(x + h, right_limit);
    if (q(lo) == 0.0) {
      hi = lo;
      return true;
    }
    if (q(hi) == 0.0) {
      lo = hi;
      return true;
    }
    if ((q(lo) < 0) != (q(hi) < 0)) return true;
    if (lo == left_limit && hi == right_limit) return false;
    h *= 2.0;
  }
  return false;
}

}  // namespace

std::vector<double> real_roots(const Polynomial& p, double residual_tol) {
  std::vector<double> approx;
  for (const auto& r : p.companion_roots()) approx.push_back(r.real());
  std::sort(approx.begin(), approx.end());

  // Group estimates that belong to one multiple root.
  std::vector<std::vector<double>> clusters;
  for (double r : approx) {
    if (!clusters.empty() &&
        std::abs(r - clusters.back().back()) < 1e-6 * std::max(1.0, std::abs(r)))
      clusters.back().push_back(r);
    else
      clusters.push_back({r});
  }

  std::vector<double> roots;
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& cl = clusters[ci];
    const double centre = 0.5 * (cl.front() + cl.back());
    const double left_limit =
        ci == 0 ? centre - 1e3 : 0.5 * (clusters[ci - 1].back() + cl.front());
    const double right_limit =
        ci + 1 == clusters.size() ? centre + 1e3 : 0.5 * (cl.back() + clusters[ci + 1].front());

    // A k-fold root is a simple root of the (k-1)-th derivative.
    Polynomial q = p;
    for (std::size_t k = 1; k < cl.size(); ++k) q = q.derivative();
    double lo = 0, hi = 0, root = centre;
    if (find_bracket(q, centre, left_limit, right_limit, lo, hi))
      root = bisect([&](double x) { return q(x); }, lo, hi, 1e-15 * std::max(1.0, std::abs(centre)));

    const double residual = std::abs(p(root)) / magnitude_scale(p, root);
    if (residual > residual_tol) {
      std::ostringstream msg;
      msg << "real root refinement failed near " << centre << " (multiplicity " << cl.size()
          << ", residual " << residual << ")";
      throw NumericError(msg.str());
    }
    for (std::size_t k = 0; k < cl.size(); ++k) roots.push_back(root);
  }
  return roots;
}

std::vector<double> roots_in_interval(const Polynomial& p, double lo, double hi,
                                      std::size_t grid) {
  std::vector<double> roots;
  if (!(hi > lo) || grid < 2) return roots;
  const double step = (hi - lo) / static_cast<double>(grid - 1);
  double x0 = lo, f0 = p(lo);
  for (std::size_t i = 1; i < grid; ++i) {
    const double x1 = lo + step * static_cast<double>(i);
    const double f1 = p(x1);
    if (f0 == 0.0 && i > 1) {
      roots.push_back(x0);
    } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
      roots.push_back(bisect([&](double x) { return p(x); }, x0, x1, 1e-15 * std::max(1.0, std::abs(x0))));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace randword
