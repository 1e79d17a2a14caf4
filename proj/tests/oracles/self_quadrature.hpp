#pragma once

// Accuracy of the corrected self-interaction rule at one target. The
// density is a smooth bump centred near the target and negligible beyond
// one period, so the exact value is an integral over the unfolded surface
// in the plane; it is computed in polar coordinates around the target with
// panelled Gauss–Legendre in the radius, which removes the 1/r singularity.

#include <cmath>
#include <vector>

#include "fill.hpp"
#include "qpml/numerics.hpp"
#include "qpml/quadrature.hpp"

namespace oracle {

using namespace qpml;

struct SelfQuadratureStudy {
  std::vector<int> n;
  std::vector<double> corrected, uncorrected, baseline;
  double reference_gap = 0.0;  ///< difference between two reference resolutions
};

inline double fitted_slope(const std::vector<int>& n, const std::vector<double>& err) {
  // Least-squares slope of log err against log n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(static_cast<double>(n[i])), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline SelfQuadratureStudy self_quadrature_study(KernelKind kind, int order, double amplitude,
                                                 const std::vector<int>& sizes, double k1 = 8.0, double k2 = 16.0) {
  const double xc = 1.0 / 8, yc = 1.0 / 12;
  auto density = [&](double x, double y) {
    const double dx = x - xc - 0.03, dy = y - yc + 0.02;
    return std::exp(-(dx * dx + dy * dy) / (2 * 0.12 * 0.12)) * (1 + 0.5 * std::sin(2 * pi * x + 1));
  };
  const Surface s = amplitude == 0.0 ? Surface::flat(0.0) : Surface::sincos(amplitude, 0.0);
  auto kern = [&](const Vec3& R, const Vec3& nt, const Vec3& ns) {
    return kernel_difference_set(k1, k2, R, nt, ns).get(kind);
  };

  auto reference = [&](double x0, double y0, int nr, int nth) {
    const auto h0 = s.sample(x0, y0, 1.0);
    const Vec3 n0 = Vec3(-h0.gx, -h0.gy, 1.0).normalized();
    const std::vector<double> breaks{0, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0, 1.3};
    cplx acc = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const auto [rho, wr] = gauss_legendre(nr, breaks[p], breaks[p + 1]);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nth; ++j) {
          const double th = 2 * pi * j / nth;
          const double x = x0 + rho[i] * std::cos(th), y = y0 + rho[i] * std::sin(th);
          const auto h = s.sample(x, y, 1.0);
          Vec3 ns(-h.gx, -h.gy, 1.0);
          const double J = ns.norm();
          ns /= J;
          const Vec3 R(-rho[i] * std::cos(th), -rho[i] * std::sin(th), s.height_difference(x0, y0, x, y, 1.0));
          acc += wr[i] * rho[i] * (2 * pi / nth) * kern(R, n0, ns) * density(x, y) * J;
        }
    }
    return acc;
  };

  SelfQuadratureStudy out;
  out.n = sizes;
  for (int n : sizes) {
    const SurfaceGrid g = build_surface(s, n, 1.0);
    const int c0 = static_cast<int>(std::lround((xc + 0.5) * n)), r0 = static_cast<int>(std::lround((yc + 0.5) * n));
    const int m = g.index(r0, c0);
    const double x0 = g.nodes[m].x(), y0 = g.nodes[m].y();
    const cplx ref = reference(x0, y0, 30, 256);
    out.reference_gap = std::max(out.reference_gap, std::abs(ref - reference(x0, y0, 40, 384)));

    cplx punct = 0.0;
    const int reach = static_cast<int>(1.3 * n) + 1;
    for (int b = -reach; b <= reach; ++b)
      for (int a = -reach; a <= reach; ++a) {
        if (a == 0 && b == 0) continue;
        const auto f = detail::fold(g, r0 + b, c0 + a);
        const Vec3 X = g.nodes[f.idx] + Vec3(f.lx, f.ly, 0.0);
        const double sg = density(X.x(), X.y());
        if (sg < 1e-20) continue;
        punct += kern(g.nodes[m] - X, g.normals[m], g.normals[f.idx]) * g.w[f.idx] * sg;
      }

    GeometricCorrection gc;
    gc.stencil = stencil_template(order);
    gc.n = n;
    const auto w = geometric_weights_at(g, m, gc.stencil);
    gc.weights.assign(static_cast<std::size_t>(g.size()) * singular_class_count * gc.stencil.size(), 0.0);
    for (int c = 0; c < singular_class_count; ++c)
      std::copy(w[c].begin(), w[c].end(), gc.weights.begin() + (static_cast<std::size_t>(m) * singular_class_count + c) * gc.stencil.size());

    // Keep the quadrant of the requested kind in the [D S; T D*] layout.
    const int N = g.size();
    const int qr = (kind == KernelKind::T || kind == KernelKind::Dstar) ? N : 0;
    const int qc = (kind == KernelKind::S || kind == KernelKind::Dstar) ? N : 0;
    struct Sink {
      const SurfaceGrid& g;
      int row, col0, N;
      decltype(density)& dens;
      cplx acc = 0.0;
      void add(int lx, int ly, int r, int c, cplx v) {
        if (r != row || c < col0 || c >= col0 + N) return;
        const Vec3 X = g.nodes[c - col0] + Vec3(lx, ly, 0.0);
        acc += v * dens(X.x(), X.y());
      }
    } sink{g, m + qr, qc, N, density};
    detail::add_self_correction(k1, k2, g, gc, m, sink);

    // Smooth part of the difference kernel at r = 0, the O(h²) term a
    // punctured sum leaves out.
    const RadialParts q = radial_parts(k1, 0.0) - radial_parts(k2, 0.0);
    cplx diag = 0.0;
    if (kind == KernelKind::S) diag = iu * q.Bi * g.w[m] * density(x0, y0);
    if (kind == KernelKind::T) diag = -iu * q.B1i * g.w[m] * density(x0, y0);

    out.uncorrected.push_back(std::abs(punct - ref));
    out.baseline.push_back(std::abs(punct + diag - ref));
    out.corrected.push_back(std::abs(punct + sink.acc - ref));
  }
  return out;
}

}  // namespace oracle
