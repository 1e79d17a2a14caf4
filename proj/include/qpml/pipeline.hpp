#pragma once

#include <string>

#include "qpml/assembly.hpp"
#include "qpml/solver.hpp"

namespace qpml {

/// Wall-clock seconds per stage: geometry and correction weights, block
/// fill, elimination and sweeps.
struct Timings {
  double pre = 0.0, fill = 0.0, solve = 0.0, total = 0.0;
};

struct SolveResult {
  StackConfig config;
  BlochPhases phases;
  RayleighBasis basis;
  Solution solution;
  Timings timings;
  std::size_t stored_entries = 0;  ///< complex entries of the assembled blocks
  double flux_error = 0.0;
};

/// Incidence-independent work is in `geo`; the angles come from geo.config
/// unless overridden.
SolveResult solve(const Geometry& geo);
SolveResult solve(const Geometry& geo, double phi_inc, double theta_inc);
SolveResult solve(const StackConfig& config, const std::string& cache_dir = "");

/// Peak resident set size of this process in bytes, 0 when unavailable.
std::size_t peak_rss_bytes();

}  // namespace qpml
