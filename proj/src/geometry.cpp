#include "qpml/geometry.hpp"

#include <cmath>
#include <fmt/format.h>

#include "qpml/numerics.hpp"

namespace qpml {

namespace {

int square_side(int count, const char* what) {
  const int s = exact_sqrt(count);
  if (s <= 0) throw ConfigError(fmt::format("{} = {} is not a positive perfect square", what, count));
  return s;
}

}  // namespace

int StackConfig::n() const { return square_side(N, "N"); }
int StackConfig::m_w() const { return square_side(M_w, "M_w"); }
int StackConfig::m() const { return square_side(M, "M"); }

std::pair<int, int> StackConfig::proxy_grid() const {
  if (n_theta > 0 && n_phi > 0) return {n_theta, n_phi};
  return factor_proxy_count(P);
}

int StackConfig::proxy_count() const {
  const auto [a, b] = proxy_grid();
  return a * b;
}

double StackConfig::top_elevation() const {
  if (z_u) return *z_u;
  return interfaces.front().max_height(d) + 0.5 * d;
}

double StackConfig::bottom_elevation() const {
  if (z_d) return *z_d;
  return interfaces.back().min_height(d) - 0.5 * d;
}

Vec3 StackConfig::wave_vector() const {
  const double k1 = k.front();
  return {k1 * std::sin(phi_inc) * std::cos(theta_inc), k1 * std::sin(phi_inc) * std::sin(theta_inc),
          k1 * std::cos(phi_inc)};
}

void StackConfig::validate() const {
  if (!(d > 0.0)) throw ConfigError("period d must be positive");
  if (interfaces.empty()) throw ConfigError("at least one interface is required");
  if (static_cast<int>(k.size()) != layer_count())
    throw ConfigError(fmt::format("expected {} wavenumbers (one per layer), got {}", layer_count(),
                                  k.size()));
  for (std::size_t j = 0; j < k.size(); ++j)
    if (!(k[j] > 0.0) || !std::isfinite(k[j]))
      throw ConfigError(fmt::format("wavenumber k[{}] = {} must be positive", j, k[j]));
  if (!(phi_inc > pi / 2 && phi_inc < pi))
    throw ConfigError(fmt::format("phi_inc = {} must lie in (pi/2, pi)", phi_inc));
  if (!(theta_inc >= 0.0 && theta_inc < 2 * pi))
    throw ConfigError(fmt::format("theta_inc = {} must lie in [0, 2pi)", theta_inc));
  n();
  m_w();
  m();
  if (n_theta > 0 || n_phi > 0) {
    if (n_theta <= 0 || n_phi <= 0) throw ConfigError("proxy grid needs both n_theta and n_phi");
    if (P != 0 && P != n_theta * n_phi)
      throw ConfigError(fmt::format("P = {} disagrees with n_theta*n_phi = {}", P, n_theta * n_phi));
  } else if (P <= 0) {
    throw ConfigError("proxy count P must be positive");
  }
  if (K < 0) throw ConfigError("Rayleigh cutoff K must be nonnegative");
  if (!(R_proxy > 0.0)) throw ConfigError("R_proxy must be positive");
  if (corr_order != 3 && corr_order != 5 && corr_order != 7)
    throw ConfigError(fmt::format("corr_order = {} unsupported (3, 5 or 7)", corr_order));
  if (!(svd_tol > 0.0 && svd_tol < 1.0)) throw ConfigError("svd_tol must lie in (0, 1)");
  // Each of U and D contributes value and derivative rows, 2M in all.
  if (2 * M < rayleigh_count())
    throw ConfigError(fmt::format("2M = {} radiation rows cannot determine {} Rayleigh orders", 2 * M,
                                  rayleigh_count()));
  for (int i = 0; i + 1 < interface_count(); ++i) {
    const double lo = interfaces[i].min_height(d), hi = interfaces[i + 1].max_height(d);
    if (!(lo > hi))
      throw ConfigError(fmt::format("interfaces {} and {} intersect (min {} <= max {})", i, i + 1, lo, hi));
  }
  if (!(top_elevation() > interfaces.front().max_height(d)))
    throw ConfigError("z_u must lie above the first interface");
  if (!(bottom_elevation() < interfaces.back().min_height(d)))
    throw ConfigError("z_d must lie below the last interface");
}

SurfaceGrid build_surface(const Surface& surface, int n, double d) {
  if (n <= 0) throw ConfigError("surface grid needs n > 0");
  SurfaceGrid g;
  g.surface = surface;
  g.n = n;
  g.d = d;
  g.h = d / n;
  const int N = n * n;
  g.nodes.resize(N);
  g.normals.resize(N);
  g.J.resize(N);
  g.w.resize(N);
  g.E.resize(N);
  g.F.resize(N);
  g.G.resize(N);
  g.gx.resize(N);
  g.gy.resize(N);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int idx = g.index(r, c);
      const double x = -0.5 * d + c * g.h, y = -0.5 * d + r * g.h;
      const auto s = surface.sample(x, y, d);
      const double E = 1.0 + s.gx * s.gx, F = s.gx * s.gy, G = 1.0 + s.gy * s.gy;
      const double det = E * G - F * F;
      if (!(det > 0.0) || !std::isfinite(det))
        throw ConfigError(fmt::format("degenerate parameterization at node ({}, {})", r, c));
      const double J = std::sqrt(det);
      g.nodes[idx] = {x, y, s.g};
      g.normals[idx] = Vec3(-s.gx, -s.gy, 1.0) / J;
      g.J[idx] = J;
      g.w[idx] = J * g.h * g.h;
      g.E[idx] = E;
      g.F[idx] = F;
      g.G[idx] = G;
      g.gx[idx] = s.gx;
      g.gy[idx] = s.gy;
    }
  }
  return g;
}

SurfaceGrid build_surface(const StackConfig& config, int i) {
  if (i < 0 || i >= config.interface_count())
    throw ConfigError(fmt::format("interface index {} out of range", i));
  return build_surface(config.interfaces[i], config.n(), config.d);
}

std::pair<double, double> layer_extent(const StackConfig& config, int j) {
  const int I = config.interface_count();
  if (j < 0 || j > I) throw ConfigError(fmt::format("layer index {} out of range", j));
  const double margin = 0.1 * config.d;
  const double lo = j == I ? config.bottom_elevation() : config.interfaces[j].min_height(config.d) - margin;
  const double hi = j == 0 ? config.top_elevation() : config.interfaces[j - 1].max_height(config.d) + margin;
  return {lo, hi};
}

WallGrids build_walls(const StackConfig& config) {
  const int mw = config.m_w(), m = config.m();
  const double d = config.d;
  WallGrids walls;
  walls.z_u = config.top_elevation();
  walls.z_d = config.bottom_elevation();
  for (int j = 0; j < config.layer_count(); ++j) {
    LayerWalls lw;
    std::tie(lw.z_lo, lw.z_hi) = layer_extent(config, j);
    const double dz = (lw.z_hi - lw.z_lo) / mw;
    for (int b = 0; b < mw; ++b) {
      const double z = lw.z_lo + (b + 0.5) * dz;
      for (int a = 0; a < mw; ++a) {
        const double s = -0.5 * d + (a + 0.5) * d / mw;
        lw.L.emplace_back(-0.5 * d, s, z);
        lw.R.emplace_back(0.5 * d, s, z);
        lw.B.emplace_back(s, -0.5 * d, z);
        lw.F.emplace_back(s, 0.5 * d, z);
      }
    }
    walls.layers.push_back(std::move(lw));
  }
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) {
      const double x = -0.5 * d + (a + 0.5) * d / m, y = -0.5 * d + (b + 0.5) * d / m;
      walls.U.emplace_back(x, y, walls.z_u);
      walls.D.emplace_back(x, y, walls.z_d);
    }
  return walls;
}

ProxyGrid build_proxy_sphere(const Vec3& center, double radius, int n_theta, int n_phi) {
  ProxyGrid pg;
  pg.center = center;
  pg.radius = radius;
  const auto [ct, wt] = gauss_legendre(n_theta);
  for (int a = 0; a < n_theta; ++a) {
    const double cz = ct[a], sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    for (int b = 0; b < n_phi; ++b) {
      const double ph = 2.0 * pi * b / n_phi;
      const Vec3 nrm(sz * std::cos(ph), sz * std::sin(ph), cz);
      pg.normals.push_back(nrm);
      pg.points.push_back(center + radius * nrm);
    }
  }
  return pg;
}

ProxyGrid build_proxy_sphere(const StackConfig& config, int j) {
  const auto [lo, hi] = layer_extent(config, j);
  const Vec3 center(0.0, 0.0, 0.5 * (lo + hi));
  const double hd = 0.5 * config.d, hz = 0.5 * (hi - lo);
  const double corner = std::sqrt(2.0 * hd * hd + hz * hz);
  if (!(corner < config.R_proxy))
    throw ConfigError(fmt::format("R_proxy = {} does not enclose the cell of layer {} (corner distance {})",
                                  config.R_proxy, j, corner));
  const auto [nt, np] = config.proxy_grid();
  return build_proxy_sphere(center, config.R_proxy, nt, np);
}

}  // namespace qpml
