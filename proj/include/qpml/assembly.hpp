#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qpml/geometry.hpp"
#include "qpml/kernels.hpp"
#include "qpml/quadrature.hpp"

namespace qpml {

/// Everything that depends on the stack geometry but not on the incidence.
struct Geometry {
  StackConfig config;
  std::vector<SurfaceGrid> surfaces;  ///< one per interface
  WallGrids walls;
  std::vector<ProxyGrid> proxies;     ///< one per layer
  std::vector<std::shared_ptr<const GeometricCorrection>> corrections;  ///< one per interface
  double build_seconds = 0.0;
};

Geometry build_geometry(const StackConfig& config, const std::string& cache_dir = "");

/// Assembled blocks with zero-based indices. For interface i:
///   A_diag[i] = A_{i,i}, A_upper[i] = A_{i,i+1}, A_lower[i] = A_{i+1,i},
///   B_diag[i] = B_{i,i} (layer i proxies), B_upper[i] = B_{i,i+1},
///   C_diag[i] = C_{i,i} (walls of layer i), C_lower[i] = C_{i+1,i};
/// Q[j] is the wall block of layer j. Interface blocks are 2N wide with the
/// τ columns first; wall blocks have four M_w-row bands (x value, x
/// derivative, y value, y derivative); U/D blocks have a value band and a
/// z-derivative band of M rows each.
struct BlockSystem {
  int N = 0, Mw = 0, M = 0, P = 0, R = 0;
  std::vector<CMat> A_diag, A_upper, A_lower;
  std::vector<CMat> B_diag, B_upper;
  std::vector<CMat> C_diag, C_lower;
  std::vector<CMat> Q;
  CMat Z_U, Z_D, V_U, V_D, W_U, W_D;
  CVec f;

  int interface_count() const { return static_cast<int>(A_diag.size()); }
  /// Number of complex entries held in all blocks and the right-hand side.
  std::size_t stored_entries() const;
};

/// The A blocks: corrected difference operators on the diagonal, smooth
/// single-wavenumber operators between neighbouring interfaces.
void assemble_A(const Geometry& geo, const BlochPhases& phases, BlockSystem& sys);
void assemble_B(const Geometry& geo, BlockSystem& sys);
void assemble_C(const Geometry& geo, const BlochPhases& phases, BlockSystem& sys);
void assemble_Q(const Geometry& geo, const BlochPhases& phases, BlockSystem& sys);
void assemble_radiation(const Geometry& geo, const BlochPhases& phases, const RayleighBasis& basis,
                        BlockSystem& sys);
CVec assemble_rhs(const StackConfig& config, const SurfaceGrid& top, int interfaces);

BlockSystem assemble_system(const Geometry& geo, const BlochPhases& phases, const RayleighBasis& basis);

/// Wall-row offsets inside C and Q blocks.
enum class WallBand : int { x_value = 0, x_deriv = 1, y_value = 2, y_deriv = 3 };

}  // namespace qpml
