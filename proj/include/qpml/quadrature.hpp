#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qpml/geometry.hpp"
#include "qpml/kernels.hpp"

namespace qpml {

/// Smooth product-trapezoid weights w_n = J_n·h².
RVec smooth_weights(const SurfaceGrid& grid);

/// Geometric singular factors appearing in the split difference kernels, with
/// R = target − source, n the target normal and n' the source normal:
/// r, (R·n')/r, (R·n)/r, (R·n)(R·n')/r³ and (n·n')/r.
enum class SingularClass : int { r = 0, dipole_src = 1, dipole_tgt = 2, hyper = 3, inv_r = 4 };
inline constexpr int singular_class_count = 5;

/// Disk-shaped correction stencil and the monomial degree fitted per class.
struct StencilTemplate {
  int order = 7;
  int radius = 3;
  std::vector<std::array<int, 2>> offsets;  ///< (column, row) lattice offsets, centre first
  std::array<int, singular_class_count> degree{};
  int size() const { return static_cast<int>(offsets.size()); }
};

StencilTemplate stencil_template(int order);

/// Correction weights that depend only on the surface shape and the grid.
/// For target m and class c, Σ_j ω_j ψ(u_j) over the stencil approximates
/// the error of the punctured trapezoid sum of s_c·ψ for smooth ψ.
struct GeometricCorrection {
  StencilTemplate stencil;
  int n = 0;
  double d = 1.0;
  std::uint64_t shape_hash = 0;
  std::vector<double> weights;  ///< [(m·classes + c)·stencil + j]

  const double* at(int m, SingularClass c) const {
    return weights.data() + (static_cast<std::size_t>(m) * singular_class_count + static_cast<int>(c)) *
                                stencil.size();
  }
};

/// Fitted weights for one target node, indexed [class][stencil point].
std::array<std::vector<double>, singular_class_count> geometric_weights_at(const SurfaceGrid& grid,
                                                                            int m,
                                                                            const StencilTemplate& stencil);

GeometricCorrection build_geometric_correction(const SurfaceGrid& grid, int order, int threads = 1);

/// Memoized build keyed by (shape hash, n, d, order); when cache_dir is
/// nonempty the weights are also read from and written to disk.
std::shared_ptr<const GeometricCorrection> geometric_correction(const SurfaceGrid& grid, int order,
                                                                int threads = 1,
                                                                const std::string& cache_dir = "");

void save_geometric_correction(const GeometricCorrection& gc, const std::string& path);
GeometricCorrection load_geometric_correction(const std::string& path);
std::string geometric_correction_filename(std::uint64_t shape_hash, int n, int order);
void clear_geometric_correction_cache();

/// Sparse correction for one kernel kind and wavenumber pair: for target m,
/// stencil entry j adds weight[m·S + j] to column source[m·S + j]. Bloch
/// phases of stencil points in neighbouring copies are folded into the weight.
struct CorrectionOperator {
  KernelKind kind = KernelKind::S;
  double k1 = 0, k2 = 0;
  int order = 7;
  int stencil_size = 0;
  int targets = 0;
  std::vector<int> source;
  std::vector<cplx> weight;

  void add_to(CMat& block) const;
};

CorrectionOperator build_correction(KernelKind kind, std::pair<double, double> k_pair,
                                    const SurfaceGrid& grid, const BlochPhases& phases, int order);
CorrectionOperator build_correction(KernelKind kind, std::pair<double, double> k_pair,
                                    const SurfaceGrid& grid, const BlochPhases& phases,
                                    const GeometricCorrection& gc);

/// Difference kernel times smooth weights over the 3×3 phased copies, with the
/// central diagonal left out.
CMat punctured_matrix(KernelKind kind, std::pair<double, double> k_pair, const SurfaceGrid& grid,
                      const BlochPhases& phases, int threads = 1);

CMat corrected_self_block(KernelKind kind, std::pair<double, double> k_pair, const SurfaceGrid& grid,
                          const BlochPhases& phases, int order, int threads = 1);

}  // namespace qpml
