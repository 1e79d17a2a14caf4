#pragma once

#include <memory>
#include <vector>

#include "qpml/assembly.hpp"
#include "qpml/linalg.hpp"

namespace qpml {

/// The system with the radiation rows folded into the end layers:
/// c̃_0 = [c_0; a^u] and c̃_I = [c_I; a^d]. Same indexing as BlockSystem; the
/// end blocks C_diag[0], C_lower[I-1], Q[0], Q[I], B_diag[0] and
/// B_upper[I-1] carry the folded rows or the zero padding.
struct FoldedSystem {
  int I = 0, N = 0, P = 0, R = 0;
  std::vector<CMat> A_diag, A_upper, A_lower;
  std::vector<CMat> B_diag, B_upper;
  std::vector<CMat> C_diag, C_lower;
  std::vector<CMat> Q;
  CVec f;

  int interface_count() const { return I; }
  int layer_count() const { return I + 1; }
};

FoldedSystem fold_radiation(BlockSystem&& sys);

/// Block-tridiagonal Schur complement on the interface densities, plus the
/// per-layer pseudo-inverse factorizations needed to recover c̃.
struct ReducedSystem {
  std::vector<CMat> diag, upper, lower;
  std::vector<LeastSquares> q_inverse;  ///< of the row-scaled Q̃_j
  std::vector<RVec> row_scale;          ///< empty when scaling is off

  int interface_count() const { return static_cast<int>(diag.size()); }
};

struct ReduceOptions {
  double svd_tol = 1e-10;
  bool row_scaling = false;
};

/// Eliminates c̃. Moves the A blocks out of `folded` and updates them in
/// place; the B, C and Q blocks stay for recovery.
ReducedSystem schur_reduce(FoldedSystem& folded, const ReduceOptions& options);

/// Forward elimination and back substitution over the block rows. Each
/// pivot block is LU-factored once; a pivot whose reciprocal condition
/// estimate is below machine epsilon raises SolverError naming the block.
/// Consumes the blocks of `reduced`.
CVec block_lu_solve(ReducedSystem& reduced, const CVec& f);

struct Solution {
  int N = 0;
  std::vector<CVec> tau, sigma;  ///< per interface
  std::vector<CVec> c;           ///< proxy strengths per layer
  CVec a_u, a_d;                 ///< Rayleigh–Bloch coefficients, RayleighBasis::index order
  CVec eta() const;              ///< stacked [τ_0; σ_0; τ_1; ...]
};

Solution recover_proxies(const FoldedSystem& folded, const ReducedSystem& reduced, const CVec& eta);

/// Row scaling for a folded wall block: reciprocal row norms of Q̃_j.
RVec wall_row_scale(const CMat& Q);

}  // namespace qpml
