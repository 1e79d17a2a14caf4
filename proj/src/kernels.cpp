#include "qpml/kernels.hpp"

#include <cmath>

#include <fmt/format.h>

namespace qpml {

namespace {

constexpr double inv4pi = 1.0 / (4.0 * pi);
constexpr double series_limit = 2.0;  // kr below this uses Taylor series
constexpr int series_terms = 16;

void require_separated(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("kernel evaluated at coincident points");
}

}  // namespace

const char* kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::S: return "S";
    case KernelKind::D: return "D";
    case KernelKind::Dstar: return "Dstar";
    case KernelKind::T: return "T";
  }
  return "?";
}

cplx KernelSet::get(KernelKind kind) const {
  switch (kind) {
    case KernelKind::S: return S;
    case KernelKind::D: return D;
    case KernelKind::Dstar: return Dstar;
    case KernelKind::T: return T;
  }
  return {};
}

cplx BlochPhases::power(int ex, int ey) const {
  auto ipow = [](cplx a, int e) {
    cplx r{1.0, 0.0};
    const cplx b = e < 0 ? std::conj(a) : a;  // |a| = 1
    for (int i = 0; i < std::abs(e); ++i) r *= b;
    return r;
  };
  return ipow(alpha_x, ex) * ipow(alpha_y, ey);
}

BlochPhases bloch_phases(const StackConfig& config) {
  const Vec3 kv = config.wave_vector();
  return {std::polar(1.0, config.d * kv.x()), std::polar(1.0, config.d * kv.y())};
}

KernelSet kernel_set(double k, const Vec3& R, const Vec3& n_tgt, const Vec3& n_src) {
  const double r = R.norm();
  require_separated(r);
  const cplx e = std::polar(inv4pi, k * r);
  const double kr = k * r;
  const cplx G = e / r;
  const cplx G1 = e * cplx(-1.0, kr) / (r * r);                       // dG/dr
  const cplx G2 = e * cplx(2.0 - kr * kr, -2.0 * kr) / (r * r * r);    // d²G/dr²
  const double Rs = R.dot(n_src), Rt = R.dot(n_tgt), nn = n_tgt.dot(n_src);
  KernelSet ks;
  ks.S = G;
  ks.D = -G1 * Rs / r;
  ks.Dstar = G1 * Rt / r;
  ks.T = -((G2 - G1 / r) * Rt * Rs / (r * r) + G1 * nn / r);
  return ks;
}

cplx greens_kernel(double k, const Vec3& target, const Vec3& source, const Vec3* n_src,
                   const Vec3* n_tgt) {
  const Vec3 R = target - source;
  const Vec3 z = Vec3::UnitZ();
  const KernelSet ks = kernel_set(k, R, n_tgt ? *n_tgt : z, n_src ? *n_src : z);
  if (n_src && n_tgt) return ks.T;
  if (n_src) return ks.D;
  if (n_tgt) return ks.Dstar;
  return ks.S;
}

RadialParts radial_parts(double k, double r) {
  RadialParts p;
  const double x = k * r;
  if (x < series_limit) {
    // Sums over n of alternating terms in x^{2n}/(2n)! and x^{2n}/(2n+1)!.
    const double x2 = x * x;
    double a = 0, a1 = 0, a1p = 0, b = 0, b1 = 0, b1p = 0;
    double pw = 1.0;    // x^{2n-2} for the current n
    double fe = 2.0;    // (2n)!
    double fo = 6.0;    // (2n+1)!
    double pwm = 1.0;   // x^{2n-4}, valid from n = 2
    b = 1.0;            // n = 0 term of the B series
    for (int n = 1; n <= series_terms; ++n) {
      const double sgn = (n % 2) ? -1.0 : 1.0;
      a += sgn * pw / fe;
      a1 += sgn * (2 * n - 1) * pw / fe;
      b += sgn * pw * x2 / fo;
      b1 += sgn * 2.0 * n * pw / fo;
      if (n >= 2) {
        a1p += sgn * (2 * n - 1) * (n - 1) * pwm / fe;
        b1p += sgn * 2.0 * n * (n - 1) * pwm / fo;
        pwm *= x2;
      }
      pw *= x2;
      fe *= (2.0 * n + 1) * (2.0 * n + 2);
      fo *= (2.0 * n + 2) * (2.0 * n + 3);
    }
    const double k2 = k * k;
    p.A = inv4pi * k2 * a;
    p.A1 = inv4pi * k2 * a1;
    p.A1p = inv4pi * k2 * k2 * a1p;
    p.Bi = inv4pi * k * b;
    p.B1i = inv4pi * k2 * k * b1;
    p.B1pi = inv4pi * k2 * k2 * k * b1p;
    return p;
  }
  const double s = std::sin(x), c = std::cos(x), sh = std::sin(0.5 * x);
  const double r2 = r * r;
  p.A = -2.0 * sh * sh * inv4pi / r2;
  p.A1 = (-x * s + 2.0 * sh * sh) * inv4pi / r2;
  p.A1p = (-x * x * c + 2.0 * x * s - 4.0 * sh * sh) * 0.5 * inv4pi / (r2 * r2);
  p.Bi = s * inv4pi / r;
  p.B1i = (x * c - s) * inv4pi / (r2 * r);
  p.B1pi = (-x * x * s - 3.0 * (x * c - s)) * 0.5 * inv4pi / (r2 * r2 * r);
  return p;
}

KernelSet kernel_difference_set(const RadialParts& q, const Vec3& R, const Vec3& n_tgt,
                                const Vec3& n_src) {
  const double r = R.norm();
  const double Rs = R.dot(n_src), Rt = R.dot(n_tgt), nn = n_tgt.dot(n_src);
  const cplx Fr(q.A1 / r, q.B1i);
  const cplx Fp(2.0 * q.A1p / r - q.A1 / (r * r * r), 2.0 * q.B1pi);
  KernelSet ks;
  ks.S = cplx(r * q.A, q.Bi);
  ks.D = -Rs * Fr;
  ks.Dstar = Rt * Fr;
  ks.T = -nn * Fr - Rt * Rs * Fp;
  return ks;
}

KernelSet kernel_difference_set(double k1, double k2, const Vec3& R, const Vec3& n_tgt,
                                const Vec3& n_src) {
  const double r = R.norm();
  require_separated(r);
  return kernel_difference_set(radial_parts(k1, r) - radial_parts(k2, r), R, n_tgt, n_src);
}

double KernelSplit::psi_c(double r) const {
  return 4.0 * pi * (radial_parts(k1, r).A - radial_parts(k2, r).A);
}

double KernelSplit::psi_s(double r) const {
  return 4.0 * pi * (radial_parts(k1, r).Bi - radial_parts(k2, r).Bi);
}

cplx phased_sum_kernel(double k, const Vec3& target, const Vec3& source, KernelKind kind,
                       const BlochPhases& phases, double d, const Vec3& n_tgt, const Vec3& n_src) {
  cplx sum{};
  for (int ly = -1; ly <= 1; ++ly)
    for (int lx = -1; lx <= 1; ++lx) {
      const Vec3 shifted = source + Vec3(d * lx, d * ly, 0.0);
      sum += phases.power(lx, ly) * kernel_set(k, target - shifted, n_tgt, n_src).get(kind);
    }
  return sum;
}

ProxyValue proxy_basis(double k, const Vec3& y_p, const Vec3& n_p, const Vec3& target,
                       const Vec3& n_tgt) {
  const KernelSet ks = kernel_set(k, target - y_p, n_tgt, n_p);
  return {ks.D + iu * k * ks.S, ks.T + iu * k * ks.Dstar};
}

IncidentSample incident_wave(const StackConfig& config, const Vec3& target) {
  const Vec3 kv = config.wave_vector();
  IncidentSample s;
  s.value = std::polar(1.0, kv.dot(target));
  s.gradient = iu * kv.cast<cplx>() * s.value;
  return s;
}

cplx vertical_wavenumber(double k, double kx, double ky) {
  const double arg = k * k - kx * kx - ky * ky;
  cplx root = std::sqrt(cplx(arg, 0.0));
  if (root.real() < 0.0 || root.imag() < 0.0) root = -root;
  if (arg >= 0.0) root = cplx(std::abs(root.real()), 0.0);
  else root = cplx(0.0, std::abs(root.imag()));
  return root;
}

RayleighBasis make_rayleigh_basis(const StackConfig& config) {
  RayleighBasis b;
  b.K = config.K;
  b.d = config.d;
  b.z_u = config.top_elevation();
  b.z_d = config.bottom_elevation();
  b.k_top = config.k.front();
  b.k_bottom = config.k.back();
  const Vec3 kv = config.wave_vector();
  for (int m = -b.K; m <= b.K; ++m) {
    b.kappa_x.push_back(kv.x() + 2.0 * pi * m / b.d);
    b.kappa_y.push_back(kv.y() + 2.0 * pi * m / b.d);
  }
  const int count = b.count();
  b.k_u.resize(count);
  b.k_d.resize(count);
  b.propagating_u.resize(count);
  b.propagating_d.resize(count);
  for (int m = -b.K; m <= b.K; ++m)
    for (int n = -b.K; n <= b.K; ++n) {
      const int idx = b.index(m, n);
      const double kx = b.kappa_x[m + b.K], ky = b.kappa_y[n + b.K];
      b.k_u[idx] = vertical_wavenumber(b.k_top, kx, ky);
      b.k_d[idx] = vertical_wavenumber(b.k_bottom, kx, ky);
      b.propagating_u[idx] = b.k_u[idx].imag() == 0.0;
      b.propagating_d[idx] = b.k_d[idx].imag() == 0.0;
    }
  return b;
}

ModeSample rayleigh_mode(const RayleighBasis& basis, int m, int n, const Vec3& target, Side side) {
  if (std::abs(m) > basis.K || std::abs(n) > basis.K)
    throw std::out_of_range(fmt::format("Rayleigh order ({}, {}) exceeds K = {}", m, n, basis.K));
  const int idx = basis.index(m, n);
  const double phase = basis.kappa_x[m + basis.K] * target.x() + basis.kappa_y[n + basis.K] * target.y();
  ModeSample s;
  if (side == Side::up) {
    const cplx kz = basis.k_u[idx];
    s.value = std::polar(1.0, phase) * std::exp(iu * kz * (target.z() - basis.z_u));
    s.dz = iu * kz * s.value;
  } else {
    const cplx kz = basis.k_d[idx];
    s.value = std::polar(1.0, phase) * std::exp(-iu * kz * (target.z() - basis.z_d));
    s.dz = -iu * kz * s.value;
  }
  return s;
}

}  // namespace qpml
