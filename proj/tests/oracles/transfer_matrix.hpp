#pragma once

// Plane-wave transfer through a stack of flat layers, used as an independent
// reference for the integral-equation solver. Field in layer j is
// A_j e^{i kz_j (z − z_top)} + B_j e^{−i kz_j (z − z_top)}; u and ∂u/∂z are
// continuous across every interface.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace oracle {

struct FlatStackResult {
  std::complex<double> r, t;   ///< amplitudes at z = 0 (incident amplitude 1)
  double reflectance = 0.0, transmittance = 0.0;
};

inline std::complex<double> kz_of(double k, double kpar) {
  const double q = k * k - kpar * kpar;
  return q >= 0 ? std::complex<double>(std::sqrt(q), 0.0) : std::complex<double>(0.0, std::sqrt(-q));
}

/// Incident wave e^{i(kx x + ky y) − i kz_0 z} from the top layer onto
/// interfaces at heights z[0] > z[1] > ...; k has one entry more than z.
inline FlatStackResult flat_stack(const std::vector<double>& k, const std::vector<double>& z, double kpar) {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  const int L = static_cast<int>(k.size());
  const int nI = static_cast<int>(z.size());
  std::vector<C> kz(L);
  for (int j = 0; j < L; ++j) kz[j] = kz_of(k[j], kpar);
  // Unknowns: r, then (A_j, B_j) for the inner layers, then t.
  const int n = 2 * nI;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  auto col_up = [&](int j) { return j == 0 ? 0 : 2 * j - 1; };   // coefficient of e^{+i kz z}
  auto col_down = [&](int j) { return j == L - 1 ? n - 1 : 2 * j; };  // of e^{−i kz z}
  for (int i = 0; i < nI; ++i) {
    const int row = 2 * i;
    for (int side = 0; side < 2; ++side) {
      const int j = i + side;
      const double s = side == 0 ? 1.0 : -1.0;
      const C up = std::exp(I * kz[j] * z[i]), down = std::exp(-I * kz[j] * z[i]);
      if (j == 0) {
        M(row, col_up(0)) += s * up;
        M(row + 1, col_up(0)) += s * I * kz[j] * up;
        rhs(row) -= s * down;
        rhs(row + 1) -= s * (-I * kz[j]) * down;
        continue;
      }
      if (j != L - 1) {
        M(row, col_up(j)) += s * up;
        M(row + 1, col_up(j)) += s * I * kz[j] * up;
      }
      M(row, col_down(j)) += s * down;
      M(row + 1, col_down(j)) += s * (-I * kz[j]) * down;
    }
  }
  const Eigen::VectorXcd x = M.fullPivLu().solve(rhs);
  FlatStackResult out;
  out.r = x(0);
  out.t = x(n - 1);
  out.reflectance = std::norm(out.r);
  out.transmittance = kz[L - 1].imag() == 0.0 ? std::norm(out.t) * kz[L - 1].real() / kz[0].real() : 0.0;
  return out;
}

}  // namespace oracle
