#include "randword/tridiagonal.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "randword/errors.hpp"

namespace randword {

namespace {

void check_shapes(std::span<const double> diag, std::span<const double> off) {
  if (diag.empty()) throw ConfigError("tridiagonal matrix must be non-empty");
  if (off.size() + 1 != diag.size()) throw ConfigError("off-diagonal must have n - 1 entries");
}

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    std::ostringstream msg;
    msg << routine << " failed (info=" << info << ")";
    throw NumericError(msg.str());
  }
}

}  // namespace

TridiagonalEigen eigh_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                  bool vectors) {
  check_shapes(diag, off);
  const auto n = static_cast<lapack_int>(diag.size());
  TridiagonalEigen out;
  out.n = diag.size();
  out.values.assign(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  if (!vectors) {
    check_info(LAPACKE_dsterf(n, out.values.data(), e.data()), "dsterf");
    return out;
  }
  // MRRR rather than divide and conquer: dstevd leans on dgemm, and the
  // dgemm kernel OpenBLAS 0.3.20 selects on some AVX-512 hosts returns wrong
  // products for n >= 256. dstemr needs no level-3 BLAS.
  out.vectors.assign(out.n * out.n, 0.0);
  std::vector<lapack_int> support(2 * out.n);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  std::vector<double> d(diag.begin(), diag.end());
  check_info(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0,
                            0, 0, &found, out.values.data(), out.vectors.data(), n, n,
                            support.data(), &tryrac),
             "dstemr");
  if (found != n) throw NumericError("dstemr returned an unexpected eigenvalue count");
  return out;
}

std::size_t count_below(std::span<const double> diag, std::span<const double> off, double x) {
  check_shapes(diag, off);
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = diag[0] - x;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    if (i + 1 == diag.size()) break;
    q = diag[i + 1] - x - off[i] * off[i] / q;
  }
  return count;
}

TridiagonalEigen eigh_tridiagonal_window(std::span<const double> diag,
                                         std::span<const double> off, double lo, double hi) {
  check_shapes(diag, off);
  TridiagonalEigen out;
  out.n = diag.size();
  if (!(hi >= lo)) return out;
  // Index range from Sturm counts; avoids sizing the output for all n vectors.
  const std::size_t first = count_below(diag, off, lo);
  const std::size_t last = count_below(diag, off, std::nextafter(hi, std::numeric_limits<double>::infinity()));
  if (last <= first) return out;
  const auto n = static_cast<lapack_int>(diag.size());
  const auto m_expected = static_cast<lapack_int>(last - first);

  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  out.values.assign(out.n, 0.0);
  out.vectors.assign(out.n * (last - first), 0.0);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(m_expected));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  check_info(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0,
                            static_cast<lapack_int>(first + 1), static_cast<lapack_int>(last), &found,
                            out.values.data(), out.vectors.data(), n, m_expected, support.data(),
                            &tryrac),
             "dstemr");
  if (found != m_expected) throw NumericError("dstemr returned an unexpected eigenvalue count");
  out.values.resize(static_cast<std::size_t>(found));
  return out;
}

TridiagonalEigen eigh_tridiagonal_ql(std::span<const double> diag, std::span<const double> off,
                                     bool vectors) {
  check_shapes(diag, off);
  const std::size_t n = diag.size();
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  // z[i * n + k] is component i of vector k while iterating.
  std::vector<double> z;
  if (vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  }
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > 60) throw NumericError("implicit QL did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double t = z[k * n + i + 1];
            z[k * n + i + 1] = s * z[k * n + i] + c * t;
            z[k * n + i] = c * z[k * n + i] - s * t;
          }
        }
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  TridiagonalEigen out;
  out.n = n;
  out.values.resize(n);
  if (vectors) out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    if (vectors)
      for (std::size_t i = 0; i < n; ++i) out.vectors[k * n + i] = z[i * n + order[k]];
  }
  return out;
}

}  // namespace randword
