#include "qpml/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fill.hpp"
#include "qpml/numerics.hpp"

namespace qpml {

namespace {

// Moment window in lattice units: χ(ρ) = ½ erfc((ρ − centre)/width). It is
// flat to ~1e−23 at the origin and its lattice aliasing is ~e^{−39}.
constexpr double window_centre = 14.0;
constexpr double window_width = 2.0;
constexpr double window_cutoff = 27.0;
constexpr double moment_tolerance = 1e-13;
constexpr int max_angular_nodes = 4096;

double window(double rho) { return 0.5 * std::erfc((rho - window_centre) / window_width); }

struct Monomials {
  std::vector<std::array<int, 2>> exps;  // ordered by total degree
  explicit Monomials(int degree) {
    for (int t = 0; t <= degree; ++t)
      for (int l1 = t; l1 >= 0; --l1) exps.push_back({l1, t - l1});
  }
  int size() const { return static_cast<int>(exps.size()); }
};

int monomial_count(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

/// Singular factors for R = target − source.
inline void singular_values(const Vec3& R, const Vec3& n_t, const Vec3& n_s, double* s) {
  const double r = R.norm();
  const double Rt = R.dot(n_t), Rs = R.dot(n_s);
  s[0] = r;
  s[1] = Rs / r;
  s[2] = Rt / r;
  s[3] = Rt * Rs / (r * r * r);
  s[4] = n_t.dot(n_s) / r;
}

/// Pseudo-inverse of the stencil Vandermonde matrix per class.
struct FitSystem {
  std::array<Eigen::MatrixXd, singular_class_count> pinv;
  std::array<Eigen::MatrixXd, singular_class_count> vander;
};

FitSystem make_fit(const StencilTemplate& st) {
  FitSystem fs;
  for (int c = 0; c < singular_class_count; ++c) {
    Monomials mono(st.degree[c]);
    Eigen::MatrixXd V(mono.size(), st.size());
    for (int l = 0; l < mono.size(); ++l)
      for (int j = 0; j < st.size(); ++j)
        V(l, j) = std::pow(st.offsets[j][0], mono.exps[l][0]) * std::pow(st.offsets[j][1], mono.exps[l][1]);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(V);
    if (cod.rank() < mono.size())
      throw SolverError(fmt::format("degenerate correction stencil: rank {} < {} moments (order {}, class {})",
                                    cod.rank(), mono.size(), st.order, c));
    fs.pinv[c] = cod.pseudoInverse();
    fs.vander[c] = V;
  }
  return fs;
}

/// Windowed moments e[c][l] = ∫ s_c p_l χ − h² Σ_{j≠0} s_c p_l χ around target m,
/// with p_l the monomials in lattice units.
std::array<std::vector<double>, singular_class_count> local_moments(const SurfaceGrid& g, int m,
                                                                    int max_degree) {
  const Monomials mono(max_degree);
  const int L = mono.size();
  const double h = g.h, d = g.d;
  const Vec3& xm = g.nodes[m];
  const Vec3& nm = g.normals[m];
  std::array<std::vector<double>, singular_class_count> lattice, integral, magnitude;
  for (int c = 0; c < singular_class_count; ++c) {
    lattice[c].assign(L, 0.0);
    integral[c].assign(L, 0.0);
    magnitude[c].assign(L, 0.0);
  }
  std::vector<double> px(max_degree + 1), py(max_degree + 1);
  double s[singular_class_count];

  // Punctured lattice sum.
  const int R = static_cast<int>(std::ceil(window_cutoff));
  const int r0 = g.row(m), c0 = g.col(m);
  for (int b = -R; b <= R; ++b)
    for (int a = -R; a <= R; ++a) {
      const double rho = std::hypot(double(a), double(b));
      if ((a == 0 && b == 0) || rho > window_cutoff) continue;
      const auto f = detail::fold(g, r0 + b, c0 + a);
      const Vec3 X = g.nodes[f.idx] + Vec3(d * f.lx, d * f.ly, 0.0);
      singular_values(xm - X, nm, g.normals[f.idx], s);
      const double w = h * h * window(rho);
      px[0] = py[0] = 1.0;
      for (int q = 1; q <= max_degree; ++q) {
        px[q] = px[q - 1] * a;
        py[q] = py[q - 1] * b;
      }
      for (int l = 0; l < L; ++l) {
        const double p = w * px[mono.exps[l][0]] * py[mono.exps[l][1]];
        for (int c = 0; c < singular_class_count; ++c) lattice[c][l] += s[c] * p;
      }
    }

  // Polar integral: Gauss–Legendre panels in ρ, nested trapezoid in θ.
  static const auto radial = [] {
    std::vector<double> breaks{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 23, window_cutoff};
    std::vector<double> x, w;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      auto [xi, wi] = gauss_legendre(14, breaks[p], breaks[p + 1]);
      x.insert(x.end(), xi.begin(), xi.end());
      w.insert(w.end(), wi.begin(), wi.end());
    }
    return std::pair{x, w};
  }();
  const auto& [rx, rw] = radial;
  const int nr = static_cast<int>(rx.size());
  std::vector<double> rchi(nr);
  for (int i = 0; i < nr; ++i) rchi[i] = window(rx[i]);

  std::array<std::vector<double>, singular_class_count> raw, rawabs;
  for (int c = 0; c < singular_class_count; ++c) {
    raw[c].assign(L, 0.0);
    rawabs[c].assign(L, 0.0);
  }
  auto accumulate_angle = [&](double theta) {
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int i = 0; i < nr; ++i) {
      const double rho = rx[i] * h;
      const double x = xm.x() + rho * ct, y = xm.y() + rho * st;
      const auto hs = g.surface.sample(x, y, d);
      const double dz = g.surface.height_difference(xm.x(), xm.y(), x, y, d);
      const Vec3 ns = Vec3(-hs.gx, -hs.gy, 1.0).normalized();
      singular_values(Vec3(-rho * ct, -rho * st, dz), nm, ns, s);
      // ρ dρ in physical units.
      const double w = rw[i] * h * rho * rchi[i];
      const double ax = rx[i] * ct, ay = rx[i] * st;
      px[0] = py[0] = 1.0;
      for (int q = 1; q <= max_degree; ++q) {
        px[q] = px[q - 1] * ax;
        py[q] = py[q - 1] * ay;
      }
      for (int l = 0; l < L; ++l) {
        const double p = w * px[mono.exps[l][0]] * py[mono.exps[l][1]];
        for (int c = 0; c < singular_class_count; ++c) {
          raw[c][l] += s[c] * p;
          rawabs[c][l] += std::abs(s[c] * p);
        }
      }
    }
  };

  int M = 64;
  for (int j = 0; j < M; ++j) accumulate_angle(2.0 * pi * j / M);
  for (int c = 0; c < singular_class_count; ++c)
    for (int l = 0; l < L; ++l) integral[c][l] = 2.0 * pi / M * raw[c][l];
  while (M < max_angular_nodes) {
    for (int j = 0; j < M; ++j) accumulate_angle(2.0 * pi * (j + 0.5) / M);
    M *= 2;
    bool converged = true;
    for (int c = 0; c < singular_class_count; ++c)
      for (int l = 0; l < L; ++l) {
        const double next = 2.0 * pi / M * raw[c][l];
        const double scale = 2.0 * pi / M * rawabs[c][l];
        if (std::abs(next - integral[c][l]) > moment_tolerance * scale) converged = false;
        integral[c][l] = next;
      }
    if (converged) break;
  }

  std::array<std::vector<double>, singular_class_count> e;
  for (int c = 0; c < singular_class_count; ++c) {
    e[c].resize(L);
    for (int l = 0; l < L; ++l) e[c][l] = integral[c][l] - lattice[c][l];
  }
  return e;
}

std::array<std::vector<double>, singular_class_count> fit_weights(
    const FitSystem& fs, const StencilTemplate& st,
    const std::array<std::vector<double>, singular_class_count>& moments) {
  std::array<std::vector<double>, singular_class_count> out;
  for (int c = 0; c < singular_class_count; ++c) {
    const int L = monomial_count(st.degree[c]);
    const Eigen::Map<const Eigen::VectorXd> e(moments[c].data(), L);
    const Eigen::VectorXd w = fs.pinv[c] * e;
    const double resid = (fs.vander[c] * w - e).norm();
    if (resid > 1e-8 * std::max(e.norm(), 1e-300) && resid > 1e-300)
      throw SolverError(fmt::format("degenerate correction stencil: moment residual {:.3e}", resid));
    out[c].assign(w.data(), w.data() + w.size());
  }
  return out;
}

}  // namespace

RVec smooth_weights(const SurfaceGrid& grid) {
  return Eigen::Map<const RVec>(grid.w.data(), grid.size());
}

StencilTemplate stencil_template(int order) {
  if (order != 3 && order != 5 && order != 7)
    throw ConfigError(fmt::format("unsupported correction order {}", order));
  StencilTemplate st;
  st.order = order;
  // One ring wider than ⌈(p−1)/2⌉: the 1/r class needs degree p−1 to keep
  // the hypersingular kernel at full order, which the minimal disk cannot fit.
  st.radius = order / 2 + 1;
  const int R = st.radius;
  for (int b = -R; b <= R; ++b)
    for (int a = -R; a <= R; ++a)
      if (a * a + b * b <= R * R) st.offsets.push_back({a, b});
  std::stable_sort(st.offsets.begin(), st.offsets.end(), [](const auto& u, const auto& v) {
    return u[0] * u[0] + u[1] * u[1] < v[0] * v[0] + v[1] * v[1];
  });
  for (int c = 0; c < singular_class_count; ++c) st.degree[c] = order - 3;
  st.degree[static_cast<int>(SingularClass::inv_r)] = order - 1;
  return st;
}

std::array<std::vector<double>, singular_class_count> geometric_weights_at(const SurfaceGrid& grid,
                                                                            int m,
                                                                            const StencilTemplate& st) {
  const FitSystem fs = make_fit(st);
  const int max_degree = *std::max_element(st.degree.begin(), st.degree.end());
  return fit_weights(fs, st, local_moments(grid, m, max_degree));
}

GeometricCorrection build_geometric_correction(const SurfaceGrid& grid, int order, int threads) {
  GeometricCorrection gc;
  gc.stencil = stencil_template(order);
  gc.n = grid.n;
  gc.d = grid.d;
  gc.shape_hash = grid.surface.shape_hash();
  const int S = gc.stencil.size();
  const int N = grid.size();
  gc.weights.assign(static_cast<std::size_t>(N) * singular_class_count * S, 0.0);
  const FitSystem fs = make_fit(gc.stencil);
  const int max_degree = *std::max_element(gc.stencil.degree.begin(), gc.stencil.degree.end());
  auto store = [&](int m, const std::array<std::vector<double>, singular_class_count>& w) {
    for (int c = 0; c < singular_class_count; ++c)
      std::copy(w[c].begin(), w[c].end(), gc.weights.begin() + (static_cast<std::size_t>(m) * singular_class_count + c) * S);
  };
  if (grid.surface.is_flat()) {
    // Every node sees the same local geometry.
    const auto w = fit_weights(fs, gc.stencil, local_moments(grid, 0, max_degree));
    for (int m = 0; m < N; ++m) store(m, w);
    return gc;
  }
  parallel_for(0, N, threads, [&](int m) { store(m, fit_weights(fs, gc.stencil, local_moments(grid, m, max_degree))); });
  return gc;
}

void CorrectionOperator::add_to(CMat& block) const {
  for (int m = 0; m < targets; ++m)
    for (int j = 0; j < stencil_size; ++j) {
      const std::size_t e = static_cast<std::size_t>(m) * stencil_size + j;
      block(m, source[e]) += weight[e];
    }
}

namespace {

/// Collects the correction entries of one kernel kind.
struct CorrectionSink {
  CorrectionOperator& op;
  detail::PhaseTable phase;
  int quadrant_row, quadrant_col, N;
  void add(int ex, int ey, int row, int col, cplx v) {
    row -= quadrant_row;
    col -= quadrant_col;
    if (row < 0 || row >= N || col < 0 || col >= N) return;
    // Entries arrive in stencil order; find the slot of this target.
    const std::size_t base = static_cast<std::size_t>(row) * op.stencil_size;
    for (int j = 0; j < op.stencil_size; ++j) {
      if (op.source[base + j] < 0) {
        op.source[base + j] = col;
        op.weight[base + j] = phase(ex, ey) * v;
        return;
      }
    }
  }
};

std::pair<int, int> quadrant_of(KernelKind kind, int N) {
  switch (kind) {
    case KernelKind::D: return {0, 0};
    case KernelKind::S: return {0, N};
    case KernelKind::T: return {N, 0};
    case KernelKind::Dstar: return {N, N};
  }
  return {0, 0};
}

}  // namespace

CorrectionOperator build_correction(KernelKind kind, std::pair<double, double> k_pair,
                                    const SurfaceGrid& grid, const BlochPhases& phases,
                                    const GeometricCorrection& gc) {
  CorrectionOperator op;
  op.kind = kind;
  op.k1 = k_pair.first;
  op.k2 = k_pair.second;
  op.order = gc.stencil.order;
  op.stencil_size = gc.stencil.size();
  op.targets = grid.size();
  op.source.assign(static_cast<std::size_t>(op.targets) * op.stencil_size, -1);
  op.weight.assign(op.source.size(), cplx{});
  const auto [qr, qc] = quadrant_of(kind, grid.size());
  CorrectionSink sink{op, detail::PhaseTable(phases), qr, qc, grid.size()};
  for (int m = 0; m < grid.size(); ++m) detail::add_self_correction(op.k1, op.k2, grid, gc, m, sink);
  return op;
}

CorrectionOperator build_correction(KernelKind kind, std::pair<double, double> k_pair,
                                    const SurfaceGrid& grid, const BlochPhases& phases, int order) {
  return build_correction(kind, k_pair, grid, phases, *geometric_correction(grid, order));
}

CMat punctured_matrix(KernelKind kind, std::pair<double, double> k_pair, const SurfaceGrid& grid,
                      const BlochPhases& phases, int threads) {
  const int N = grid.size();
  CMat out = CMat::Zero(N, N);
  detail::DirectSink direct(out, phases);
  const auto [qr, qc] = quadrant_of(kind, N);
  detail::QuadrantSink<detail::DirectSink> sink{direct, qr, qc, N, N};
  detail::fill_self_block(k_pair.first, k_pair.second, grid, nullptr, threads, sink);
  return out;
}

CMat corrected_self_block(KernelKind kind, std::pair<double, double> k_pair, const SurfaceGrid& grid,
                          const BlochPhases& phases, int order, int threads) {
  const int N = grid.size();
  const auto gc = geometric_correction(grid, order, threads);
  CMat out = CMat::Zero(N, N);
  detail::DirectSink direct(out, phases);
  const auto [qr, qc] = quadrant_of(kind, N);
  detail::QuadrantSink<detail::DirectSink> sink{direct, qr, qc, N, N};
  detail::fill_self_block(k_pair.first, k_pair.second, grid, gc.get(), threads, sink);
  return out;
}

}  // namespace qpml
