#pragma once

#include <utility>
#include <vector>

namespace qpml {

/// Gauss–Legendre nodes and weights on [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a = -1.0,
                                                                   double b = 1.0);

/// Factor a proxy count into (n_theta, n_phi) with n_theta·n_phi = P and n_phi
/// as close as possible to 2·n_theta (ties go to the smaller n_theta).
std::pair<int, int> factor_proxy_count(int P);

/// Integer square root when `value` is a perfect square, otherwise -1.
int exact_sqrt(long long value);

}  // namespace qpml
