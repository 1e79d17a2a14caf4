#pragma once

#include <optional>
#include <vector>

#include "qpml/surface.hpp"
#include "qpml/types.hpp"

namespace qpml {

/// Full problem description. Interfaces and layers are zero-based here:
/// interface i separates layer i (above) from layer i+1 (below), so there are
/// I interfaces and I+1 layers, and k[j] is the wavenumber of layer j.
struct StackConfig {
  double d = 1.0;
  std::vector<double> k;
  double phi_inc = 5.0 * pi / 6.0;
  double theta_inc = 0.0;

  int N = 16 * 16;   ///< nodes per interface, n²
  int M_w = 10 * 10; ///< nodes per side wall
  int M = 10 * 10;   ///< nodes on U and on D
  int P = 0;         ///< proxies per layer; 0 means n_theta·n_phi
  int n_theta = 0;   ///< explicit proxy grid, used when nonzero
  int n_phi = 0;
  int K = 3;
  double R_proxy = 1.5;
  int corr_order = 7;

  std::vector<Surface> interfaces;
  std::optional<double> z_u, z_d;

  bool phase_zd = true;       ///< phased neighbour sum for Z_D; false gives the unphased form
  double svd_tol = 1e-10;     ///< relative truncation of the pseudo-inverses
  bool row_scaling = false;   ///< equilibrate wall rows before the least-squares solve
  int threads = 1;

  int interface_count() const { return static_cast<int>(interfaces.size()); }
  int layer_count() const { return interface_count() + 1; }
  int n() const;   ///< sqrt(N)
  int m_w() const; ///< sqrt(M_w)
  int m() const;   ///< sqrt(M)
  std::pair<int, int> proxy_grid() const;
  int proxy_count() const;
  int rayleigh_count() const { return (2 * K + 1) * (2 * K + 1); }

  double top_elevation() const;    ///< z_u, defaulted from Γ_0
  double bottom_elevation() const; ///< z_d, defaulted from Γ_{I-1}
  Vec3 wave_vector() const;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Sampled interface on the n×n double-trapezoidal parameter grid. Node
/// index = row·n + col with x = −d/2 + col·h and y = −d/2 + row·h.
struct SurfaceGrid {
  Surface surface;
  int n = 0;
  double d = 1.0;
  double h = 0.0;
  std::vector<Vec3> nodes;
  std::vector<Vec3> normals;  ///< unit, positive z-component
  std::vector<double> J, w;   ///< area element and smooth weight J·h²
  std::vector<double> E, F, G;
  std::vector<double> gx, gy;

  int size() const { return n * n; }
  int index(int row, int col) const { return row * n + col; }
  int row(int idx) const { return idx / n; }
  int col(int idx) const { return idx % n; }
};

/// Side-wall panels of one layer; normals are +x on L and R, +y on B and F.
struct LayerWalls {
  double z_lo = 0.0, z_hi = 0.0;
  std::vector<Vec3> L, R, B, F;
};

struct WallGrids {
  std::vector<LayerWalls> layers;
  std::vector<Vec3> U, D;  ///< normals +z
  double z_u = 0.0, z_d = 0.0;

  static Vec3 normal_x() { return Vec3::UnitX(); }
  static Vec3 normal_y() { return Vec3::UnitY(); }
  static Vec3 normal_z() { return Vec3::UnitZ(); }
};

struct ProxyGrid {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  int size() const { return static_cast<int>(points.size()); }
};

SurfaceGrid build_surface(const StackConfig& config, int i);
SurfaceGrid build_surface(const Surface& surface, int n, double d);
WallGrids build_walls(const StackConfig& config);
/// Vertical extent of the wall panels of layer j.
std::pair<double, double> layer_extent(const StackConfig& config, int j);
ProxyGrid build_proxy_sphere(const StackConfig& config, int j);
ProxyGrid build_proxy_sphere(const Vec3& center, double radius, int n_theta, int n_phi);

}  // namespace qpml
