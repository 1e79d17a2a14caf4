#include "qpml/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <fmt/format.h>

#include "fill.hpp"
#include "qpml/diagnostics.hpp"

namespace qpml {

using detail::DirectSink;

Geometry build_geometry(const StackConfig& config, const std::string& cache_dir) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  Geometry geo;
  geo.config = config;
  const int I = config.interface_count();
  for (int i = 0; i < I; ++i) geo.surfaces.push_back(build_surface(config, i));
  geo.walls = build_walls(config);
  for (int j = 0; j <= I; ++j) geo.proxies.push_back(build_proxy_sphere(config, j));
  for (int i = 0; i < I; ++i)
    geo.corrections.push_back(
        geometric_correction(geo.surfaces[i], config.corr_order, config.threads, cache_dir));
  const double h = config.d / config.n();
  for (int i = 0; i + 1 < I; ++i) {
    const double gap = config.interfaces[i].min_height(config.d) - config.interfaces[i + 1].max_height(config.d);
    if (gap < 2.0 * h)
      warn(fmt::format("interfaces {} and {} are {:.3g} apart, less than 2h = {:.3g}; the smooth rule "
                       "between them is inaccurate",
                       i, i + 1, gap, 2.0 * h));
  }
  geo.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return geo;
}

std::size_t BlockSystem::stored_entries() const {
  std::size_t total = static_cast<std::size_t>(f.size());
  for (const auto* list : {&A_diag, &A_upper, &A_lower, &B_diag, &B_upper, &C_diag, &C_lower, &Q})
    for (const CMat& m : *list) total += static_cast<std::size_t>(m.size());
  for (const CMat* m : {&Z_U, &Z_D, &V_U, &V_D, &W_U, &W_D}) total += static_cast<std::size_t>(m->size());
  return total;
}

namespace {

/// Proxy values and normal derivatives of one layer at target points, written
/// into rows [value_row0, +T) and [deriv_row0, +T) as sign·(φ(x) − scale·φ(x')).
/// When `pair` is given, the second point set is subtracted with `scale`.
void proxy_rows(double k, const ProxyGrid& pg, const std::vector<Vec3>& targets,
                const std::vector<Vec3>* normals, const Vec3& fixed_normal, const std::vector<Vec3>* pair,
                cplx scale, double sign, int value_row0, int deriv_row0, int threads, CMat& out) {
  const int P = pg.size();
  parallel_for(0, static_cast<int>(targets.size()), threads, [&](int t) {
    const Vec3& nt = normals ? (*normals)[t] : fixed_normal;
    for (int p = 0; p < P; ++p) {
      ProxyValue v = proxy_basis(k, pg.points[p], pg.normals[p], targets[t], nt);
      if (pair) {
        const ProxyValue u = proxy_basis(k, pg.points[p], pg.normals[p], (*pair)[t], nt);
        v.value -= scale * u.value;
        v.normal_derivative -= scale * u.normal_derivative;
      }
      out(value_row0 + t, p) = sign * v.value;
      out(deriv_row0 + t, p) = sign * v.normal_derivative;
    }
  });
}

/// Near-field part of the quasi-periodicity defect u(R) − α_x u(L) and
/// u(F) − α_y u(B) of one interface's potentials on the walls of a layer.
/// Shifting the 3×3 copies by one period leaves only the outermost column of
/// copies on each side, which gives the α_x^{-1} and α_x² terms.
void fill_wall_block(double k, const LayerWalls& lw, const SurfaceGrid& gs, const BlochPhases& phases,
                     int threads, CMat& out) {
  const int Mw = static_cast<int>(lw.L.size());
  const double d = gs.d;
  const Vec3 nx = WallGrids::normal_x(), ny = WallGrids::normal_y();
  DirectSink sink(out, phases);
  for (int l = -1; l <= 1; ++l) {
    detail::fill_point_rows(k, lw.R, nx, Vec3(d, l * d, 0.0), -1, -l, 1.0, gs, 0, Mw, threads, sink);
    detail::fill_point_rows(k, lw.L, nx, Vec3(-d, -l * d, 0.0), 2, l, -1.0, gs, 0, Mw, threads, sink);
    detail::fill_point_rows(k, lw.F, ny, Vec3(l * d, d, 0.0), -l, -1, 1.0, gs, 2 * Mw, 3 * Mw, threads, sink);
    detail::fill_point_rows(k, lw.B, ny, Vec3(-l * d, -d, 0.0), l, 2, -1.0, gs, 2 * Mw, 3 * Mw, threads, sink);
  }
}

/// Potentials of gs on a horizontal plane of points (U or D), either over the
/// phased 3×3 copies or the central copy only.
void fill_plane_block(double k, const std::vector<Vec3>& pts, const SurfaceGrid& gs, const BlochPhases& phases,
                      bool phased, int threads, CMat& out) {
  const int M = static_cast<int>(pts.size());
  DirectSink sink(out, phases);
  const int L = phased ? 1 : 0;
  for (int ly = -L; ly <= L; ++ly)
    for (int lx = -L; lx <= L; ++lx)
      detail::fill_point_rows(k, pts, WallGrids::normal_z(), Vec3(-gs.d * lx, -gs.d * ly, 0.0), lx, ly, 1.0,
                              gs, 0, M, threads, sink);
}

}  // namespace

void assemble_A(const Geometry& geo, const BlochPhases& phases, BlockSystem& sys) {
  const StackConfig& cfg = geo.config;
  const int I = cfg.interface_count();
  const int N = geo.surfaces.front().size();
  sys.A_diag.assign(I, CMat());
  sys.A_upper.assign(std::max(I - 1, 0), CMat());
  sys.A_lower.assign(std::max(I - 1, 0), CMat());
  for (int i = 0; i < I; ++i) {
    CMat& A = sys.A_diag[i];
    A = CMat::Zero(2 * N, 2 * N);
    DirectSink sink(A, phases);
    detail::fill_self_block(cfg.k[i], cfg.k[i + 1], geo.surfaces[i], geo.corrections[i].get(), cfg.threads,
                            sink);
    A.topLeftCorner(N, N).diagonal().array() += 1.0;
    A.bottomRightCorner(N, N).diagonal().array() -= 1.0;
  }
  for (int i = 0; i + 1 < I; ++i) {
    const double k = cfg.k[i + 1];
    CMat& U = sys.A_upper[i];
    U = CMat::Zero(2 * N, 2 * N);
    DirectSink su(U, phases);
    detail::fill_cross_block(k, geo.surfaces[i], geo.surfaces[i + 1], cfg.threads, su);
    U = -U;
    CMat& Lo = sys.A_lower[i];
    Lo = CMat::Zero(2 * N, 2 * N);
    DirectSink sl(Lo, phases);
    detail::fill_cross_block(k, geo.surfaces[i + 1], geo.surfaces[i], cfg.threads, sl);
  }
}

void assemble_B(const Geometry& geo, BlockSystem& sys) {
  const StackConfig& cfg = geo.config;
  const int I = cfg.interface_count();
  sys.B_diag.assign(I, CMat());
  sys.B_upper.assign(I, CMat());
  for (int i = 0; i < I; ++i) {
    const SurfaceGrid& g = geo.surfaces[i];
    const int N = g.size();
    for (int side = 0; side < 2; ++side) {
      const int j = i + side;
      CMat& B = side == 0 ? sys.B_diag[i] : sys.B_upper[i];
      B.resize(2 * N, geo.proxies[j].size());
      proxy_rows(cfg.k[j], geo.proxies[j], g.nodes, &g.normals, Vec3::UnitZ(), nullptr, 0.0,
                 side == 0 ? 1.0 : -1.0, 0, N, cfg.threads, B);
    }
  }
}

void assemble_C(const Geometry& geo, const BlochPhases& phases, BlockSystem& sys) {
  const StackConfig& cfg = geo.config;
  const int I = cfg.interface_count();
  const int N = geo.surfaces.front().size();
  const int Mw = cfg.M_w;
  sys.C_diag.assign(I, CMat());
  sys.C_lower.assign(I, CMat());
  for (int i = 0; i < I; ++i) {
    sys.C_diag[i] = CMat::Zero(4 * Mw, 2 * N);
    fill_wall_block(cfg.k[i], geo.walls.layers[i], geo.surfaces[i], phases, cfg.threads, sys.C_diag[i]);
    sys.C_lower[i] = CMat::Zero(4 * Mw, 2 * N);
    fill_wall_block(cfg.k[i + 1], geo.walls.layers[i + 1], geo.surfaces[i], phases, cfg.threads,
                    sys.C_lower[i]);
  }
}

void assemble_Q(const Geometry& geo, const BlochPhases& phases, BlockSystem& sys) {
  const StackConfig& cfg = geo.config;
  const int Mw = cfg.M_w;
  sys.Q.assign(cfg.layer_count(), CMat());
  for (int j = 0; j < cfg.layer_count(); ++j) {
    const LayerWalls& lw = geo.walls.layers[j];
    CMat& Q = sys.Q[j];
    Q.resize(4 * Mw, geo.proxies[j].size());
    proxy_rows(cfg.k[j], geo.proxies[j], lw.R, nullptr, WallGrids::normal_x(), &lw.L, phases.alpha_x, 1.0, 0, Mw,
               cfg.threads, Q);
    proxy_rows(cfg.k[j], geo.proxies[j], lw.F, nullptr, WallGrids::normal_y(), &lw.B, phases.alpha_y, 1.0,
               2 * Mw, 3 * Mw, cfg.threads, Q);
  }
}

void assemble_radiation(const Geometry& geo, const BlochPhases& phases, const RayleighBasis& basis,
                        BlockSystem& sys) {
  const StackConfig& cfg = geo.config;
  const int N = geo.surfaces.front().size();
  const int M = cfg.M;
  if (M < basis.count())
    throw ConfigError(fmt::format("M = {} cannot match {} Rayleigh orders", M, basis.count()));
  const Vec3 nz = WallGrids::normal_z();

  sys.Z_U = CMat::Zero(2 * M, 2 * N);
  fill_plane_block(cfg.k.front(), geo.walls.U, geo.surfaces.front(), phases, true, cfg.threads, sys.Z_U);
  sys.Z_D = CMat::Zero(2 * M, 2 * N);
  fill_plane_block(cfg.k.back(), geo.walls.D, geo.surfaces.back(), phases, cfg.phase_zd, cfg.threads, sys.Z_D);

  sys.V_U.resize(2 * M, geo.proxies.front().size());
  proxy_rows(cfg.k.front(), geo.proxies.front(), geo.walls.U, nullptr, nz, nullptr, 0.0, 1.0, 0, M, cfg.threads,
             sys.V_U);
  sys.V_D.resize(2 * M, geo.proxies.back().size());
  proxy_rows(cfg.k.back(), geo.proxies.back(), geo.walls.D, nullptr, nz, nullptr, 0.0, 1.0, 0, M, cfg.threads,
             sys.V_D);

  const int R = basis.count();
  sys.W_U.resize(2 * M, R);
  sys.W_D.resize(2 * M, R);
  for (int c = 0; c < R; ++c) {
    const auto [mo, no] = basis.order(c);
    for (int t = 0; t < M; ++t) {
      const ModeSample up = rayleigh_mode(basis, mo, no, geo.walls.U[t], Side::up);
      sys.W_U(t, c) = -up.value;
      sys.W_U(M + t, c) = -up.dz;
      const ModeSample dn = rayleigh_mode(basis, mo, no, geo.walls.D[t], Side::down);
      sys.W_D(t, c) = -dn.value;
      sys.W_D(M + t, c) = -dn.dz;
    }
  }
}

CVec assemble_rhs(const StackConfig& config, const SurfaceGrid& top, int interfaces) {
  const int N = top.size();
  CVec f = CVec::Zero(2 * static_cast<Eigen::Index>(N) * interfaces);
  for (int m = 0; m < N; ++m) {
    const IncidentSample s = incident_wave(config, top.nodes[m]);
    f(m) = -s.value;
    f(N + m) = -(s.gradient.array() * top.normals[m].cast<cplx>().array()).sum();
  }
  return f;
}

BlockSystem assemble_system(const Geometry& geo, const BlochPhases& phases, const RayleighBasis& basis) {
  const StackConfig& cfg = geo.config;
  BlockSystem sys;
  sys.N = geo.surfaces.front().size();
  sys.Mw = cfg.M_w;
  sys.M = cfg.M;
  sys.P = geo.proxies.front().size();
  sys.R = basis.count();
  assemble_A(geo, phases, sys);
  assemble_B(geo, sys);
  assemble_C(geo, phases, sys);
  assemble_Q(geo, phases, sys);
  assemble_radiation(geo, phases, basis, sys);
  sys.f = assemble_rhs(cfg, geo.surfaces.front(), cfg.interface_count());
  return sys;
}

}  // namespace qpml
