#pragma once

#include <vector>

#include "qpml/geometry.hpp"
#include "qpml/types.hpp"

namespace qpml {

enum class KernelKind { S, D, Dstar, T };

const char* kernel_name(KernelKind kind);

/// The four kernels at one (target, source) pair, laid out as in the 2×2
/// operator [D S; T D*].
struct KernelSet {
  cplx S{}, D{}, Dstar{}, T{};
  cplx get(KernelKind kind) const;
};

struct BlochPhases {
  cplx alpha_x{1.0, 0.0};
  cplx alpha_y{1.0, 0.0};
  /// alpha_x^ex · alpha_y^ey for small integer exponents.
  cplx power(int ex, int ey) const;
};

BlochPhases bloch_phases(const StackConfig& config);

/// G = e^{ikr}/(4πr) or one of its normal derivatives: no normals gives S,
/// n_src gives D, n_tgt gives D*, both give T.
cplx greens_kernel(double k, const Vec3& target, const Vec3& source, const Vec3* n_src = nullptr,
                   const Vec3* n_tgt = nullptr);

/// All four kernels for R = target − source (R ≠ 0).
KernelSet kernel_set(double k, const Vec3& R, const Vec3& n_tgt, const Vec3& n_src);

/// Radial pieces of G_k = 1/(4πr) + r·A(t) + i·Bi(t), t = r², together with
/// A1 = d(rA)/dr, A1p = dA1/dt, B1 = 2 dB/dt and B1p = dB1/dt. All are even
/// in r and evaluated by series for small kr, so r = 0 is allowed.
struct RadialParts {
  double A = 0, A1 = 0, A1p = 0;
  double Bi = 0, B1i = 0, B1pi = 0;
  RadialParts operator-(const RadialParts& o) const {
    return {A - o.A, A1 - o.A1, A1p - o.A1p, Bi - o.Bi, B1i - o.B1i, B1pi - o.B1pi};
  }
};

RadialParts radial_parts(double k, double r);

/// G^{k1} − G^{k2} for all four kinds, computed through the split so that
/// close pairs do not suffer cancellation.
KernelSet kernel_difference_set(double k1, double k2, const Vec3& R, const Vec3& n_tgt,
                                const Vec3& n_src);
KernelSet kernel_difference_set(const RadialParts& diff, const Vec3& R, const Vec3& n_tgt,
                                const Vec3& n_src);

/// Smooth factors of the S-difference, (G¹ − G²)·4π = r·ψ_c + i·ψ_s.
struct KernelSplit {
  double k1 = 0, k2 = 0;
  double psi_c(double r) const;  ///< (cos k1 r − cos k2 r)/r²
  double psi_s(double r) const;  ///< (sin k1 r − sin k2 r)/r
};

/// Σ over the 3×3 neighbour copies of alpha^l · kernel(target, source + d·l).
cplx phased_sum_kernel(double k, const Vec3& target, const Vec3& source, KernelKind kind,
                       const BlochPhases& phases, double d, const Vec3& n_tgt = Vec3::UnitZ(),
                       const Vec3& n_src = Vec3::UnitZ());

struct ProxyValue {
  cplx value{};
  cplx normal_derivative{};
};

/// φ_p = ∂G/∂n_p + i·k·G for the proxy at y_p with outward normal n_p, and
/// its derivative along n_tgt at the target.
ProxyValue proxy_basis(double k, const Vec3& y_p, const Vec3& n_p, const Vec3& target,
                       const Vec3& n_tgt = Vec3::UnitZ());

struct IncidentSample {
  cplx value{};
  Eigen::Vector3cd gradient = Eigen::Vector3cd::Zero();
};

IncidentSample incident_wave(const StackConfig& config, const Vec3& target);

/// Vertical wavenumber sqrt(k² − kx² − ky²) on the positive real or positive
/// imaginary axis.
cplx vertical_wavenumber(double k, double kx, double ky);

struct RayleighBasis {
  int K = 0;
  double d = 1.0;
  double z_u = 0.0, z_d = 0.0;
  double k_top = 0.0, k_bottom = 0.0;
  std::vector<double> kappa_x, kappa_y;  ///< indexed by m + K and n + K
  std::vector<cplx> k_u, k_d;            ///< indexed by index(m, n)
  std::vector<bool> propagating_u, propagating_d;

  int count() const { return (2 * K + 1) * (2 * K + 1); }
  int index(int m, int n) const { return (m + K) * (2 * K + 1) + (n + K); }
  std::pair<int, int> order(int idx) const { return {idx / (2 * K + 1) - K, idx % (2 * K + 1) - K}; }
};

RayleighBasis make_rayleigh_basis(const StackConfig& config);

enum class Side { up, down };

struct ModeSample {
  cplx value{};
  cplx dz{};
};

ModeSample rayleigh_mode(const RayleighBasis& basis, int m, int n, const Vec3& target, Side side);

}  // namespace qpml
