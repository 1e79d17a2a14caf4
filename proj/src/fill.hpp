#pragma once

// Block fill loops shared by the quadrature and assembly modules. Every loop
// is parallel over target rows and each row is written by one thread only.

#include <cmath>
#include <vector>

#include "qpml/geometry.hpp"
#include "qpml/kernels.hpp"
#include "qpml/parallel.hpp"
#include "qpml/quadrature.hpp"

namespace qpml::detail {

inline int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

/// Phase powers alpha_x^ex alpha_y^ey for ex, ey in [-2, 2].
class PhaseTable {
 public:
  explicit PhaseTable(const BlochPhases& p) {
    for (int ex = -2; ex <= 2; ++ex)
      for (int ey = -2; ey <= 2; ++ey) v_[ex + 2][ey + 2] = p.power(ex, ey);
  }
  cplx operator()(int ex, int ey) const { return v_[ex + 2][ey + 2]; }

 private:
  cplx v_[5][5];
};

/// Accumulates phased contributions into one dense matrix.
struct DirectSink {
  CMat& out;
  PhaseTable phase;
  DirectSink(CMat& m, const BlochPhases& p) : out(m), phase(p) {}
  void add(int ex, int ey, int row, int col, cplx v) { out(row, col) += phase(ex, ey) * v; }
};

/// Keeps one quadrant of a 2×2 operator block and drops the rest.
template <class Inner>
struct QuadrantSink {
  Inner& inner;
  int row0, col0, rows, cols;
  void add(int ex, int ey, int row, int col, cplx v) {
    row -= row0;
    col -= col0;
    if (row >= 0 && row < rows && col >= 0 && col < cols) inner.add(ex, ey, row, col, v);
  }
};

/// Writes a kernel set into the [D S; T D*] layout of a 2Nt × 2Ns block.
template <class Sink>
inline void put_block(Sink& sink, int ex, int ey, int m, int n, int Nt, int Ns, const KernelSet& k) {
  sink.add(ex, ey, m, n, k.D);
  sink.add(ex, ey, m, n + Ns, k.S);
  sink.add(ex, ey, m + Nt, n, k.T);
  sink.add(ex, ey, m + Nt, n + Ns, k.Dstar);
}

inline KernelSet scaled(KernelSet k, double w) {
  k.S *= w;
  k.D *= w;
  k.Dstar *= w;
  k.T *= w;
  return k;
}

/// Unfolded lattice position (row, col) → folded node index and copy offset.
struct Folded {
  int idx, lx, ly;
};

inline Folded fold(const SurfaceGrid& g, int row, int col) {
  const int lx = floor_div(col, g.n), ly = floor_div(row, g.n);
  return {g.index(row - ly * g.n, col - lx * g.n), lx, ly};
}

/// Local correction of target m for the difference kernels of (k1, k2).
template <class Sink>
void add_self_correction(double k1, double k2, const SurfaceGrid& g, const GeometricCorrection& gc,
                         int m, Sink& sink) {
  const int N = g.size();
  const int S = gc.stencil.size();
  const int r0 = g.row(m), c0 = g.col(m);
  const Vec3& xm = g.nodes[m];
  const double* wr = gc.at(m, SingularClass::r);
  const double* wds = gc.at(m, SingularClass::dipole_src);
  const double* wdt = gc.at(m, SingularClass::dipole_tgt);
  const double* wh = gc.at(m, SingularClass::hyper);
  const double* wi = gc.at(m, SingularClass::inv_r);
  for (int j = 0; j < S; ++j) {
    const auto [a, b] = gc.stencil.offsets[j];
    const Folded f = fold(g, r0 + b, c0 + a);
    const Vec3 X = g.nodes[f.idx] + Vec3(g.d * f.lx, g.d * f.ly, 0.0);
    const double r = (xm - X).norm();
    const double t = r * r;
    const RadialParts q = radial_parts(k1, r) - radial_parts(k2, r);
    const double J = g.J[f.idx];
    KernelSet c;
    c.S = wr[j] * q.A * J;
    c.D = -wds[j] * q.A1 * J;
    c.Dstar = wdt[j] * q.A1 * J;
    c.T = (wh[j] * (q.A1 - 2.0 * t * q.A1p) - wi[j] * q.A1) * J;
    if (a == 0 && b == 0) {
      // The punctured sum also drops the smooth part at the target.
      c.S += iu * q.Bi * g.w[m];
      c.T += -iu * q.B1i * g.w[m];
    }
    put_block(sink, f.lx, f.ly, m, f.idx, N, N, c);
  }
}

/// Difference-kernel self block over the 3×3 copies, central diagonal
/// punctured, plus local corrections when gc is given.
template <class Sink>
void fill_self_block(double k1, double k2, const SurfaceGrid& g, const GeometricCorrection* gc,
                     int threads, Sink& sink) {
  const int N = g.size();
  parallel_for(0, N, threads, [&](int m) {
    const Vec3& xm = g.nodes[m];
    const Vec3& nm = g.normals[m];
    for (int ly = -1; ly <= 1; ++ly)
      for (int lx = -1; lx <= 1; ++lx) {
        const Vec3 shift(g.d * lx, g.d * ly, 0.0);
        const bool centre = lx == 0 && ly == 0;
        for (int n = 0; n < N; ++n) {
          if (centre && n == m) continue;
          const Vec3 R = xm - (g.nodes[n] + shift);
          const double r = R.norm();
          const RadialParts q = radial_parts(k1, r) - radial_parts(k2, r);
          put_block(sink, lx, ly, m, n, N, N,
                    scaled(kernel_difference_set(q, R, nm, g.normals[n]), g.w[n]));
        }
      }
    if (gc) add_self_correction(k1, k2, g, *gc, m, sink);
  });
}

/// Single-wavenumber block from source surface gs to target surface gt, 3×3
/// phased copies of the source, smooth rule.
template <class Sink>
void fill_cross_block(double k, const SurfaceGrid& gt, const SurfaceGrid& gs, int threads, Sink& sink) {
  const int Nt = gt.size(), Ns = gs.size();
  parallel_for(0, Nt, threads, [&](int m) {
    const Vec3& xm = gt.nodes[m];
    const Vec3& nm = gt.normals[m];
    for (int ly = -1; ly <= 1; ++ly)
      for (int lx = -1; lx <= 1; ++lx) {
        const Vec3 shift(gs.d * lx, gs.d * ly, 0.0);
        for (int n = 0; n < Ns; ++n)
          put_block(sink, lx, ly, m, n, Nt, Ns,
                    scaled(kernel_set(k, xm - (gs.nodes[n] + shift), nm, gs.normals[n]), gs.w[n]));
      }
  });
}

/// Rows of value ([D S]) and normal-derivative ([T D*]) samples of the
/// potentials of gs at shifted target points, scaled by sign and tagged with
/// the phase exponents (ex, ey).
template <class Sink>
void fill_point_rows(double k, const std::vector<Vec3>& targets, const Vec3& n_tgt, const Vec3& shift,
                     int ex, int ey, double sign, const SurfaceGrid& gs, int value_row0, int deriv_row0,
                     int threads, Sink& sink) {
  const int Ns = gs.size();
  parallel_for(0, static_cast<int>(targets.size()), threads, [&](int t) {
    const Vec3 x = targets[t] + shift;
    for (int n = 0; n < Ns; ++n) {
      const KernelSet ks = kernel_set(k, x - gs.nodes[n], n_tgt, gs.normals[n]);
      const double w = sign * gs.w[n];
      sink.add(ex, ey, value_row0 + t, n, w * ks.D);
      sink.add(ex, ey, value_row0 + t, n + Ns, w * ks.S);
      sink.add(ex, ey, deriv_row0 + t, n, w * ks.T);
      sink.add(ex, ey, deriv_row0 + t, n + Ns, w * ks.Dstar);
    }
  });
}

}  // namespace qpml::detail
