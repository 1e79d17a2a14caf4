#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qpml/assembly.hpp"
#include "qpml/pipeline.hpp"

namespace qpml {

/// Relative energy defect over the propagating orders, normalised by the
/// incident vertical flux k_1·|cos φ_inc|.
double flux_error(const Solution& sol, const StackConfig& config, const RayleighBasis& basis);
double flux_error(const CVec& a_u, const CVec& a_d, const StackConfig& config, const RayleighBasis& basis);

/// Per-order power fractions k_u|a_u|²/(k_1|cos φ_inc|), zero for evanescent
/// orders, in RayleighBasis::index order.
struct PowerFractions {
  std::vector<double> reflected, transmitted;
  double reflectance = 0.0, transmittance = 0.0;
};

PowerFractions power_fractions(const Solution& sol, const StackConfig& config, const RayleighBasis& basis);

/// Layer containing p, or -1 when p lies on an interface.
int layer_of(const StackConfig& config, const Vec3& p);

struct FieldGrid {
  std::vector<Vec3> points;
  std::vector<int> layer;
  std::vector<bool> masked;        ///< within the exclusion distance of an interface
  std::vector<cplx> scattered, total;
};

/// Scattered field from the ansatz at each point (smooth rule for the
/// layer potentials), with u_inc added in the top layer. Points closer than
/// 5h to an interface, measured vertically, are masked.
FieldGrid eval_field(const SolveResult& result, const Geometry& geo, const std::vector<Vec3>& points);

/// Regular nx×nz grid in the plane y = y0 covering [−d/2, d/2] in x.
std::vector<Vec3> xz_plane(double d, double y0, double z_lo, double z_hi, int nx, int nz);

struct SpectraRow {
  double phi_sweep = 0.0;   ///< requested angle, may exceed π
  double phi_inc = 0.0, theta_inc = 0.0;  ///< angles actually solved
  bool ok = false;
  std::string error;
  double reflectance = 0.0, transmittance = 0.0, flux_error = 0.0;
  PowerFractions powers;
};

struct SpectraTable {
  int K = 0;
  Timings timings;  ///< geometry once, fill and solve summed over angles
  std::vector<SpectraRow> rows;
};

/// Map a sweep angle in (π/2, 3π/2) to the incidence cone: φ > π becomes
/// (2π − φ, θ + π).
std::pair<double, double> fold_incidence(double phi, double theta);

/// One solve per angle, reusing the geometry and correction weights.
/// Failures are recorded in the row and the sweep continues.
SpectraTable spectra_sweep(const StackConfig& config, const std::vector<double>& phis,
                           const std::string& cache_dir = "",
                           const std::function<void(const SpectraRow&)>& progress = {});

struct ConvergenceRow {
  int value = 0;
  double probe_error = 0.0;  ///< max |u − u_ref| over the probes
  double flux_error = 0.0;
  Timings timings;
  std::vector<cplx> probe_values;
};

struct ConvergenceTable {
  std::string variable;  ///< "N" or "P"
  std::vector<Vec3> probes;
  std::vector<ConvergenceRow> rows;  ///< the last row is the reference
};

/// Sweeps N or P; the largest value is solved last and taken as reference.
ConvergenceTable convergence_study(const StackConfig& config, const std::string& variable,
                                   std::vector<int> values, const std::vector<Vec3>& probes,
                                   const std::string& cache_dir = "");

}  // namespace qpml
