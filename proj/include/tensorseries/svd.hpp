#pragma once

#include "tensorseries/core.hpp"

namespace tensorseries {

/// Thin singular value decomposition A = U diag(sigma) V^T with
/// k = min(rows, cols) singular values sorted in decreasing order.
struct Svd {
  Matrix u;      // rows x k, orthonormal columns where sigma > 0
  Vector sigma;  // k
  Matrix v;      // cols x k, orthonormal columns

  /// Number of singular values above `rel_tol * sigma_max`.
  int rank(double rel_tol = 1e-14) const;
};

/// One-sided (Hestenes) Jacobi SVD. Accurate to a few ulps of sigma_max
/// at desk scale.
Svd jacobi_svd(const Matrix& a);

/// Singular values only, decreasing.
Vector singular_values(const Matrix& a);

}  // namespace tensorseries
