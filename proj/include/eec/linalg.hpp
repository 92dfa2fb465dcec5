#pragma once

#include <cstddef>
#include <vector>

#include "eec/matrix.hpp"

namespace eec {

/// Spectral decomposition S = P diag(values) P^T.
///
/// Columns of `vectors` are orthonormal eigenvectors; `values` are sorted
/// descending with ties kept in Jacobi-sweep order. Each column is signed so
/// that its first entry of magnitude above 1e-12 is positive.
struct SymEigen {
  Matrix vectors;
  std::vector<double> values;
};

/// Cyclic Jacobi eigensolver for symmetric matrices up to 64x64.
/// Throws DomainError for non-symmetric input and ConvergenceError when the
/// sweep cap is exhausted.
SymEigen sym_eigendecomposition(const Matrix& s);

/// M = N Q with N lower-triangular (nonnegative diagonal) and Q orthogonal.
struct LqResult {
  Matrix lower;       // m x n
  Matrix orthogonal;  // n x n
};

LqResult lq_decomposition(const Matrix& m);

/// Singular values of an m x n matrix (n >= m), descending, length m.
/// Uses the 2x2 closed form when m == n == 2 and one-sided Jacobi otherwise.
std::vector<double> singular_values(const Matrix& a);

/// Closed-form singular values of [[a, b], [c, d]] as (largest, smallest).
void singular_values_2x2(double a, double b, double c, double d, double& s1, double& s2);

/// Canonical non-central Wishart parameterization: Sigma^{-1} = diag(scales),
/// mean lower-triangular with nonnegative diagonal, n >= m >= 2.
struct WishartParams {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> scales;
  Matrix mean;

  /// Throws DomainError if any invariant is violated.
  void validate() const;

  static WishartParams central(std::size_t m, std::size_t n, double s);
};

/// Reduce (Sigma, M) to canonical form. The returned scales are ascending
/// (eigenvalues of Sigma descending), so canonical inputs are fixed points.
WishartParams canonicalize(const Matrix& sigma, const Matrix& mean);

}  // namespace eec
