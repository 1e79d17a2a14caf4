#include "qpml/numerics.hpp"

#include <cmath>
#include <cstdlib>

#include "qpml/types.hpp"

namespace qpml {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = wi;
  }
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
  return {x, w};
}

std::pair<int, int> factor_proxy_count(int P) {
  int best = 1, best_gap = std::abs(P - 2);
  for (int a = 1; a * a <= 2 * P; ++a) {
    if (P % a != 0) continue;
    const int gap = std::abs(P / a - 2 * a);
    if (gap < best_gap) {
      best = a;
      best_gap = gap;
    }
  }
  return {best, P / best};
}

int exact_sqrt(long long value) {
  if (value < 0) return -1;
  long long r = std::llround(std::sqrt(static_cast<double>(value)));
  while (r * r > value) --r;
  while ((r + 1) * (r + 1) <= value) ++r;
  return r * r == value ? static_cast<int>(r) : -1;
}

}  // namespace qpml
