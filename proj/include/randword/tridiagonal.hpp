#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace randword {

/// Eigenpairs of a real symmetric tridiagonal matrix. Eigenvalues ascend;
/// eigenvector k occupies vectors[k * n, (k + 1) * n).
struct TridiagonalEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;

  std::size_t count() const { return values.size(); }
  bool has_vectors() const { return !vectors.empty(); }
  std::span<const double> vector(std::size_t k) const {
    return {vectors.data() + k * n, n};
  }
};

/// Full decomposition (LAPACK dstemr), or eigenvalues only (dsterf).
/// `off` holds the n - 1 off-diagonal entries.
TridiagonalEigen eigh_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                  bool vectors = true);

/// Eigenpairs with eigenvalue in [lo, hi] only (LAPACK dstemr on the index
/// range found by Sturm counts).
TridiagonalEigen eigh_tridiagonal_window(std::span<const double> diag,
                                         std::span<const double> off, double lo, double hi);

/// Implicit-shift QL with eigenvector accumulation. Slow but self-contained;
/// kept as the reference the LAPACK path is tested against.
TridiagonalEigen eigh_tridiagonal_ql(std::span<const double> diag, std::span<const double> off,
                                     bool vectors = true);

/// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t count_below(std::span<const double> diag, std::span<const double> off, double x);

}  // namespace randword
