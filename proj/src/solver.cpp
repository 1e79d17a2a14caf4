#include "qpml/solver.hpp"

#include <fmt/format.h>
#include <limits>

#include "qpml/diagnostics.hpp"

namespace qpml {

namespace {

CMat stack_rows(const CMat& top, const CMat& bottom) {
  CMat out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

CMat pad_columns(CMat&& m, Eigen::Index extra) {
  const Eigen::Index c = m.cols();
  m.conservativeResize(Eigen::NoChange, c + extra);
  m.rightCols(extra).setZero();
  return std::move(m);
}

CMat fold_wall(const CMat& Q, const CMat& V, const CMat& W) {
  CMat out = CMat::Zero(Q.rows() + V.rows(), Q.cols() + W.cols());
  out.topLeftCorner(Q.rows(), Q.cols()) = Q;
  out.bottomLeftCorner(V.rows(), V.cols()) = V;
  out.bottomRightCorner(W.rows(), W.cols()) = W;
  return out;
}

}  // namespace

FoldedSystem fold_radiation(BlockSystem&& sys) {
  const int I = sys.interface_count();
  if (I < 1) throw ConfigError("fold_radiation needs at least one interface");
  if (sys.Z_U.cols() != 2 * sys.N || sys.Z_D.cols() != 2 * sys.N || sys.V_U.cols() != sys.Q.front().cols() ||
      sys.V_D.cols() != sys.Q.back().cols() || sys.W_U.rows() != sys.V_U.rows() || sys.W_D.rows() != sys.V_D.rows() ||
      static_cast<int>(sys.Q.size()) != I + 1)
    throw SolverError("fold_radiation: block dimensions disagree");
  FoldedSystem fs;
  fs.I = I;
  fs.N = sys.N;
  fs.P = sys.P;
  fs.R = sys.R;
  fs.A_diag = std::move(sys.A_diag);
  fs.A_upper = std::move(sys.A_upper);
  fs.A_lower = std::move(sys.A_lower);
  fs.B_diag = std::move(sys.B_diag);
  fs.B_upper = std::move(sys.B_upper);
  fs.C_diag = std::move(sys.C_diag);
  fs.C_lower = std::move(sys.C_lower);
  fs.Q = std::move(sys.Q);
  fs.f = std::move(sys.f);

  fs.B_diag[0] = pad_columns(std::move(fs.B_diag[0]), sys.W_U.cols());
  fs.B_upper[I - 1] = pad_columns(std::move(fs.B_upper[I - 1]), sys.W_D.cols());
  fs.C_diag[0] = stack_rows(fs.C_diag[0], sys.Z_U);
  fs.C_lower[I - 1] = stack_rows(fs.C_lower[I - 1], sys.Z_D);
  fs.Q[0] = fold_wall(fs.Q[0], sys.V_U, sys.W_U);
  fs.Q[I] = fold_wall(fs.Q[I], sys.V_D, sys.W_D);
  return fs;
}

RVec wall_row_scale(const CMat& Q) {
  RVec s = Q.rowwise().norm();
  for (Eigen::Index r = 0; r < s.size(); ++r) s(r) = s(r) > 0.0 ? 1.0 / s(r) : 1.0;
  return s;
}

ReducedSystem schur_reduce(FoldedSystem& fs, const ReduceOptions& options) {
  const int I = fs.interface_count();
  ReducedSystem rs;
  rs.diag = std::move(fs.A_diag);
  rs.upper = std::move(fs.A_upper);
  rs.lower = std::move(fs.A_lower);
  for (int j = 0; j <= I; ++j) {
    // Layer j touches interface j-1 from below and interface j from above.
    RVec scale;
    if (options.row_scaling) scale = wall_row_scale(fs.Q[j]);
    const LeastSquares ls = options.row_scaling ? truncated_svd(scale.asDiagonal() * fs.Q[j], options.svd_tol)
                                                : truncated_svd(fs.Q[j], options.svd_tol);
    note(2, fmt::format("layer {}: wall block {}x{}, numerical rank {}", j, ls.rows, ls.cols, ls.rank()));
    auto project = [&](const CMat& C) { return options.row_scaling ? ls.project(scale.asDiagonal() * C) : ls.project(C); };

    const bool up = j >= 1, down = j < I;
    CMat Yup, Ydown, Zup, Zdown;
    if (up) {
      Yup = project(fs.C_lower[j - 1]);
      Zup = ls.lift(fs.B_upper[j - 1]);
    }
    if (down) {
      Ydown = project(fs.C_diag[j]);
      Zdown = ls.lift(fs.B_diag[j]);
    }
    if (up) rs.diag[j - 1].noalias() -= Zup * Yup;
    if (down) rs.diag[j].noalias() -= Zdown * Ydown;
    if (up && down) {
      rs.upper[j - 1].noalias() -= Zup * Ydown;
      rs.lower[j - 1].noalias() -= Zdown * Yup;
    }
    rs.q_inverse.push_back(ls);
    rs.row_scale.push_back(std::move(scale));
  }
  return rs;
}

CVec block_lu_solve(ReducedSystem& rs, const CVec& f) {
  using LU = Eigen::PartialPivLU<Eigen::Ref<CMat>>;
  const int I = rs.interface_count();
  const Eigen::Index n = rs.diag.front().rows();
  if (f.size() != n * I) throw SolverError("block_lu_solve: right-hand side length mismatch");
  std::vector<std::unique_ptr<LU>> lu(I);
  std::vector<CVec> fp(I);
  const double eps = std::numeric_limits<double>::epsilon();
  auto factor = [&](int i) {
    lu[i] = std::make_unique<LU>(rs.diag[i]);
    const double rc = lu[i]->rcond();
    note(1, fmt::format("pivot block {}: reciprocal condition estimate {:.3e}", i, rc));
    if (!(rc > eps))
      throw SolverError(fmt::format("pivot block {} is numerically singular (rcond {:.3e})", i, rc));
  };
  fp[0] = f.segment(0, n);
  factor(0);
  for (int i = 1; i < I; ++i) {
    // upper[i-1] becomes (Ã'_{i-1,i-1})^{-1} Ã_{i-1,i} and is kept for the back sweep.
    CMat g = lu[i - 1]->solve(rs.upper[i - 1]);
    rs.upper[i - 1] = std::move(g);
    rs.diag[i].noalias() -= rs.lower[i - 1] * rs.upper[i - 1];
    fp[i] = f.segment(i * n, n) - rs.lower[i - 1] * lu[i - 1]->solve(fp[i - 1]);
    rs.lower[i - 1].resize(0, 0);
    factor(i);
  }
  CVec eta(n * I);
  eta.segment((I - 1) * n, n) = lu[I - 1]->solve(fp[I - 1]);
  for (int i = I - 2; i >= 0; --i)
    eta.segment(i * n, n) = lu[i]->solve(fp[i]) - rs.upper[i] * eta.segment((i + 1) * n, n);
  return eta;
}

CVec Solution::eta() const {
  CVec out(2 * static_cast<Eigen::Index>(N) * tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    out.segment(2 * N * i, N) = tau[i];
    out.segment(2 * N * i + N, N) = sigma[i];
  }
  return out;
}

Solution recover_proxies(const FoldedSystem& fs, const ReducedSystem& rs, const CVec& eta) {
  const int I = fs.interface_count();
  const int N = fs.N;
  Solution sol;
  sol.N = N;
  for (int i = 0; i < I; ++i) {
    sol.tau.push_back(eta.segment(2 * N * i, N));
    sol.sigma.push_back(eta.segment(2 * N * i + N, N));
  }
  for (int j = 0; j <= I; ++j) {
    CVec rhs = CVec::Zero(fs.Q[j].rows());
    if (j >= 1) rhs += fs.C_lower[j - 1] * eta.segment(2 * N * (j - 1), 2 * N);
    if (j < I) rhs += fs.C_diag[j] * eta.segment(2 * N * j, 2 * N);
    if (rs.row_scale[j].size()) rhs = rs.row_scale[j].asDiagonal() * rhs;
    CVec c = -rs.q_inverse[j].solve(rhs);
    if (j == 0) {
      sol.a_u = c.tail(fs.R);
      c.conservativeResize(fs.P);
    }
    if (j == I) {
      sol.a_d = c.tail(fs.R);
      c.conservativeResize(fs.P);
    }
    sol.c.push_back(std::move(c));
  }
  return sol;
}

}  // namespace qpml
