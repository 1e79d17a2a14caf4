#pragma once

#include <array>
#include <string>
#include <vector>

#include "qpml/postprocess.hpp"

namespace qpml {

const char* version();

/// Carried in every artifact: a hash of the canonical job config and the
/// code version.
struct Provenance {
  std::string config_hash;
  std::string code_version = version();
};

void write_spectra_csv(const std::string& path, const SpectraTable& table, const RayleighBasis& basis,
                       const Provenance& prov);
void write_convergence_csv(const std::string& path, const ConvergenceTable& table, const Provenance& prov);
/// Columns m, n, Re a, Im a, propagating flag and power fraction, one row
/// per order and side.
void write_rayleigh_csv(const std::string& path, const SolveResult& result, const Provenance& prov);

/// Raw field grid: magic "QPMLFLD\0", u32 version, u32 nx, ny, nz, f64
/// bounding box (x0, x1, y0, y1, z0, z1), u32 provenance length and bytes,
/// then nx·ny·nz (re, im) float64 pairs of the total field, x fastest.
/// Masked points are stored as NaN.
struct FieldFile {
  std::array<std::uint32_t, 3> dims{};
  std::array<double, 6> bbox{};
  std::string provenance;
  std::vector<cplx> values;
};

void write_field_bin(const std::string& path, const FieldGrid& grid, const std::array<std::uint32_t, 3>& dims,
                     const std::array<double, 6>& bbox, const Provenance& prov);
FieldFile read_field_bin(const std::string& path);

}  // namespace qpml
