#pragma once

#include "qpml/types.hpp"

namespace qpml {

/// Truncated SVD A ≈ U·diag(s)·V^H keeping singular values above
/// tol·s_max. Applies the pseudo-inverse without ever forming it.
struct LeastSquares {
  int rows = 0, cols = 0;
  double tol = 0.0;
  double sigma_max = 0.0;
  CMat U;   ///< rows × rank
  RVec s;   ///< rank
  CMat V;   ///< cols × rank

  int rank() const { return static_cast<int>(s.size()); }
  /// Minimum-norm least-squares solution of A·X = rhs.
  CMat solve(const CMat& rhs) const;
  /// U^H·rhs, the left half of the pseudo-inverse.
  CMat project(const CMat& rhs) const;
  /// lhs·V·diag(1/s), the right half of the pseudo-inverse.
  CMat lift(const CMat& lhs) const;
};

/// Factors A (any shape) with LAPACK's divide-and-conquer SVD. Throws
/// SolverError when every singular value falls below the tolerance.
LeastSquares truncated_svd(const CMat& A, double tol);

CMat lsq_apply(const CMat& Q, const CMat& rhs, double tol);

}  // namespace qpml
