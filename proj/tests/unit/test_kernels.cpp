#include <gtest/gtest.h>

#include <cmath>

#include "qpml/kernels.hpp"

using namespace qpml;

namespace {

cplx G(double k, const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  return std::exp(iu * k * r) / (4.0 * pi * r);
}

// Derivative of f along n by a 4th-order central difference.
template <class F>
cplx directional(F f, const Vec3& p, const Vec3& n, double s = 1e-3) {
  return (-f(p + 2 * s * n) + 8.0 * f(p + s * n) - 8.0 * f(p - s * n) + f(p - 2 * s * n)) / (12.0 * s);
}

template <class F>
cplx helmholtz_residual(F f, const Vec3& p, double k, double s) {
  cplx lap = -6.0 * f(p);
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e(a) = s;
    lap += f(p + e) + f(p - e);
  }
  return lap / (s * s) + k * k * f(p);
}

StackConfig oblique_incidence() {
  StackConfig c;
  c.k = {8.0, 16.0};
  c.interfaces = {Surface::flat(0.0)};
  c.phi_inc = 5.0 * pi / 6.0;
  c.theta_inc = 0.0;
  return c;
}

const Vec3 nt = Vec3(0.3, -0.2, 1.0).normalized();
const Vec3 ns = Vec3(-0.1, 0.4, 1.0).normalized();

}  // namespace

TEST(Kernels, SingleLayerAtUnitDistance) {
  const cplx v = greens_kernel(2 * pi, Vec3(1, 0, 0), Vec3::Zero());
  EXPECT_NEAR(std::abs(v - 1.0 / (4 * pi)), 0.0, 1e-15);
}

TEST(Kernels, MatchesFiniteDifferencesOfG) {
  const double k = 7.0;
  const Vec3 x(0.3, 0.1, 0.2), y(-0.1, 0.25, -0.15);
  const KernelSet ks = kernel_set(k, x - y, nt, ns);
  EXPECT_NEAR(std::abs(ks.S - G(k, x, y)), 0.0, 1e-15);
  const cplx D = directional([&](const Vec3& q) { return G(k, x, q); }, y, ns);
  const cplx Ds = directional([&](const Vec3& q) { return G(k, q, y); }, x, nt);
  const cplx T = directional(
      [&](const Vec3& q) { return directional([&](const Vec3& s) { return G(k, q, s); }, y, ns); }, x, nt);
  EXPECT_LT(std::abs(ks.D - D), 1e-9);
  EXPECT_LT(std::abs(ks.Dstar - Ds), 1e-9);
  EXPECT_LT(std::abs(ks.T - T), 1e-7);
  EXPECT_EQ(greens_kernel(k, x, y, &ns, &nt), ks.T);
}

TEST(Kernels, Reciprocity) {
  const double k = 11.0;
  const Vec3 x(0.2, -0.3, 0.1), y(-0.4, 0.2, -0.3);
  const KernelSet a = kernel_set(k, x - y, nt, ns);
  const KernelSet b = kernel_set(k, y - x, ns, nt);
  EXPECT_NEAR(std::abs(a.S - b.S), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.T - b.T), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(a.D - b.Dstar), 0.0, 1e-14);
}

TEST(Kernels, HelmholtzResidualIsSecondOrder) {
  const double k = 6.0;
  const Vec3 y(0.0, 0.0, 0.0), x0(0.4, -0.3, 0.5);
  for (KernelKind kind : {KernelKind::S, KernelKind::D, KernelKind::Dstar, KernelKind::T}) {
    auto f = [&](const Vec3& x) { return kernel_set(k, x - y, nt, ns).get(kind); };
    const double e1 = std::abs(helmholtz_residual(f, x0, k, 2e-2));
    const double e2 = std::abs(helmholtz_residual(f, x0, k, 1e-2));
    EXPECT_GE(std::log2(e1 / e2), 1.9) << kernel_name(kind);
  }
}

TEST(Kernels, RadialSplitMatchesClosedForm) {
  const double k = 9.0;
  for (double r : {1e-6, 1e-3, 0.05, 0.7, 1.9, 2.5}) {
    const RadialParts p = radial_parts(k, r);
    const cplx g = std::exp(iu * k * r) / (4 * pi * r);
    const cplx split = 1.0 / (4 * pi * r) + r * p.A + iu * p.Bi;
    EXPECT_LT(std::abs(split - g) / std::abs(g), 1e-14) << "r = " << r;
  }
}

TEST(Kernels, DifferenceSetMatchesDirectDifference) {
  const double k1 = 8.0, k2 = 16.0;
  const Vec3 R(0.21, -0.13, 0.05);
  const KernelSet d = kernel_difference_set(k1, k2, R, nt, ns);
  const KernelSet a = kernel_set(k1, R, nt, ns), b = kernel_set(k2, R, nt, ns);
  for (KernelKind kind : {KernelKind::S, KernelKind::D, KernelKind::Dstar, KernelKind::T}) {
    const cplx ref = a.get(kind) - b.get(kind);
    EXPECT_LT(std::abs(d.get(kind) - ref), 1e-12 * std::max(1.0, std::abs(ref))) << kernel_name(kind);
  }
}

TEST(Kernels, SmoothFactorsMatchProductForm) {
  // cos a − cos b = −2 sin((a+b)/2) sin((a−b)/2) avoids the cancellation of the direct difference.
  const KernelSplit s{8.0, 16.0};
  for (double r = 1e-4; r <= 1.0; r *= 1.7) {
    const double c = -2.0 * std::sin(12.0 * r) * std::sin(-4.0 * r) / (r * r);
    const double sn = 2.0 * std::cos(12.0 * r) * std::sin(-4.0 * r) / r;
    EXPECT_NEAR(s.psi_c(r) / c, 1.0, 1e-13) << r;
    EXPECT_NEAR(s.psi_s(r) / sn, 1.0, 1e-13) << r;
  }
}

TEST(Bloch, ObliqueIncidence) {
  const StackConfig c = oblique_incidence();
  const Vec3 kv = c.wave_vector();
  EXPECT_NEAR(kv.x(), 4.0, 1e-14);
  EXPECT_NEAR(kv.y(), 0.0, 1e-14);
  EXPECT_NEAR(kv.z(), -4.0 * std::sqrt(3.0), 1e-14);
  const BlochPhases p = bloch_phases(c);
  EXPECT_NEAR(std::abs(p.alpha_x - std::exp(4.0 * iu)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p.alpha_y - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.power(2, -1) - std::exp(8.0 * iu)), 0.0, 1e-14);
}

TEST(Bloch, PhasedSumEqualsNineCopies) {
  const double k = 5.0;
  const Vec3 x(0.1, 0.2, 0.3), y(-0.2, 0.1, -0.1);
  for (BlochPhases p : {BlochPhases{}, BlochPhases{std::exp(0.7 * iu), std::exp(-1.3 * iu)}, BlochPhases{-1.0, 1.0}}) {
    for (KernelKind kind : {KernelKind::S, KernelKind::D, KernelKind::Dstar, KernelKind::T}) {
      cplx ref = 0.0;
      for (int ly = -1; ly <= 1; ++ly)
        for (int lx = -1; lx <= 1; ++lx)
          ref += std::pow(p.alpha_x, lx) * std::pow(p.alpha_y, ly) *
                 kernel_set(k, x - (y + Vec3(lx, ly, 0.0)), nt, ns).get(kind);
      const cplx got = phased_sum_kernel(k, x, y, kind, p, 1.0, nt, ns);
      EXPECT_LT(std::abs(got - ref), 1e-13 * std::abs(ref));
    }
  }
}

TEST(Proxy, BasisIsDipolePlusMonopole) {
  const double k = 1.0;
  const Vec3 yp(0.0, 0.0, 1.5), np = Vec3(0.2, 0.1, 1.0).normalized();
  const Vec3 x = yp + np;  // distance one along the normal
  const ProxyValue v = proxy_basis(k, yp, np, x, nt);
  const cplx dip = directional([&](const Vec3& q) { return G(k, x, q); }, yp, np);
  EXPECT_LT(std::abs(v.value - (dip + iu * k * G(k, x, yp))), 1e-10);
  // Closed form on the normal line: ∂G/∂n_p = −(ikr − 1)e^{ikr}/(4πr²) at r = 1.
  const cplx closed = -(iu * k - 1.0) * std::exp(iu * k) / (4 * pi) + iu * k * std::exp(iu * k) / (4 * pi);
  EXPECT_LT(std::abs(v.value - closed), 1e-14);
  const cplx dn = directional([&](const Vec3& q) { return proxy_basis(k, yp, np, q).value; }, x, nt);
  EXPECT_LT(std::abs(v.normal_derivative - dn), 1e-10);
}

TEST(Proxy, SatisfiesHelmholtz) {
  const double k = 8.0;
  const Vec3 yp(1.5, 0.0, 0.0), np = Vec3::UnitX();
  auto f = [&](const Vec3& q) { return proxy_basis(k, yp, np, q).value; };
  const Vec3 x0(-0.5, 0.0, 0.0);
  const double e1 = std::abs(helmholtz_residual(f, x0, k, 2e-2));
  const double e2 = std::abs(helmholtz_residual(f, x0, k, 1e-2));
  EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(Incident, PlaneWave) {
  const StackConfig c = oblique_incidence();
  const IncidentSample s = incident_wave(c, Vec3::Zero());
  EXPECT_EQ(s.value, cplx(1.0, 0.0));
  const Vec3 p(0.3, -0.2, 0.7);
  const IncidentSample q = incident_wave(c, p);
  EXPECT_NEAR(std::abs(q.value - std::exp(iu * (4.0 * p.x() - 4.0 * std::sqrt(3.0) * p.z()))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(q.gradient(2) - iu * (-4.0 * std::sqrt(3.0)) * q.value), 0.0, 1e-13);
}

TEST(Rayleigh, SampleOrders) {
  StackConfig c = oblique_incidence();
  c.K = 3;
  const RayleighBasis b = make_rayleigh_basis(c);
  EXPECT_NEAR(std::abs(b.k_u[b.index(0, 0)] - 4.0 * std::sqrt(3.0)), 0.0, 1e-14);
  EXPECT_TRUE(b.propagating_u[b.index(0, 0)]);
  const double kx = 4.0 + 2 * pi;
  EXPECT_NEAR(b.kappa_x[1 + b.K], kx, 1e-14);
  const cplx k10 = b.k_u[b.index(1, 0)];
  EXPECT_NEAR(k10.real(), 0.0, 1e-15);
  EXPECT_NEAR(k10.imag(), std::sqrt(kx * kx - 64.0), 1e-13);
  EXPECT_NEAR(k10.imag(), 6.4610, 1e-4);
  EXPECT_FALSE(b.propagating_u[b.index(1, 0)]);
  EXPECT_NEAR(std::abs(b.k_d[b.index(0, 0)] - 4.0 * std::sqrt(15.0)), 0.0, 1e-13);
}

TEST(Rayleigh, BranchRuleUpToK10) {
  for (double phi : {0.51 * pi, 2.0, 5.0 * pi / 6.0, 0.99 * pi})
    for (double theta : {0.0, pi / 4.0, 2.5}) {
      StackConfig c = oblique_incidence();
      c.k = {10.0, 20.0};
      c.phi_inc = phi;
      c.theta_inc = theta;
      c.K = 10;
      const RayleighBasis b = make_rayleigh_basis(c);
      for (int i = 0; i < b.count(); ++i)
        for (cplx kz : {b.k_u[i], b.k_d[i]}) {
          EXPECT_GE(kz.real(), 0.0);
          EXPECT_GE(kz.imag(), 0.0);
          EXPECT_TRUE(kz.real() == 0.0 || kz.imag() == 0.0);
        }
    }
  EXPECT_EQ(vertical_wavenumber(5.0, 3.0, 0.0), cplx(4.0, 0.0));
  EXPECT_EQ(vertical_wavenumber(3.0, 5.0, 0.0), cplx(0.0, 4.0));
}

TEST(Rayleigh, ModesAreOutgoing) {
  StackConfig c = oblique_incidence();
  c.K = 2;
  const RayleighBasis b = make_rayleigh_basis(c);
  const Vec3 p(0.1, 0.2, b.z_u + 0.3);
  const ModeSample up = rayleigh_mode(b, 0, 0, p, Side::up);
  EXPECT_NEAR(std::abs(up.value - std::exp(iu * (4.0 * 0.1 + 4.0 * std::sqrt(3.0) * 0.3))), 0.0, 1e-14);
  const ModeSample ev = rayleigh_mode(b, 2, 0, p, Side::up);
  EXPECT_LT(std::abs(ev.value), 1.0);  // evanescent orders decay away from the plane
  const ModeSample down = rayleigh_mode(b, 0, 0, Vec3(0.0, 0.0, b.z_d - 0.2), Side::down);
  EXPECT_NEAR(std::abs(down.value - std::exp(iu * 4.0 * std::sqrt(15.0) * 0.2)), 0.0, 1e-13);
}
