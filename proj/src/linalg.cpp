#include "qpml/linalg.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace qpml {

LeastSquares truncated_svd(const CMat& A, double tol) {
  LeastSquares ls;
  ls.rows = static_cast<int>(A.rows());
  ls.cols = static_cast<int>(A.cols());
  ls.tol = tol;
  const lapack_int m = ls.rows, n = ls.cols, k = std::min(m, n);
  if (k == 0) throw SolverError("pseudo-inverse of an empty matrix");
  CMat work = A;
  CMat U(m, k), VT(k, n);
  RVec s(k);
  auto z = [](CMat& a) { return reinterpret_cast<lapack_complex_double*>(a.data()); };
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, z(work), m, s.data(), z(U), m, z(VT), k);
  if (info != 0) throw SolverError(fmt::format("zgesdd failed with info = {}", info));
  ls.sigma_max = s(0);
  int r = 0;
  while (r < k && s(r) > tol * s(0)) ++r;
  if (r == 0) throw SolverError("pseudo-inverse has rank zero at the requested tolerance");
  ls.U = U.leftCols(r);
  ls.s = s.head(r);
  ls.V = VT.topRows(r).adjoint();
  return ls;
}

CMat LeastSquares::project(const CMat& rhs) const { return U.adjoint() * rhs; }

CMat LeastSquares::lift(const CMat& lhs) const {
  CMat out = lhs * V;
  out.array().rowwise() /= s.transpose().array().cast<cplx>();
  return out;
}

CMat LeastSquares::solve(const CMat& rhs) const {
  CMat y = project(rhs);
  y.array().colwise() /= s.array().cast<cplx>();
  return V * y;
}

CMat lsq_apply(const CMat& Q, const CMat& rhs, double tol) { return truncated_svd(Q, tol).solve(rhs); }

}  // namespace qpml
