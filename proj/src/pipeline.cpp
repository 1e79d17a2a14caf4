#include "qpml/pipeline.hpp"

#include <chrono>
#include <fmt/format.h>
#include <fstream>
#include <string>

#include "qpml/diagnostics.hpp"
#include "qpml/postprocess.hpp"

namespace qpml {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SolveResult solve(const Geometry& geo, double phi_inc, double theta_inc) {
  SolveResult out;
  out.config = geo.config;
  out.config.phi_inc = phi_inc;
  out.config.theta_inc = theta_inc;
  out.config.validate();
  out.phases = bloch_phases(out.config);
  out.basis = make_rayleigh_basis(out.config);

  auto t0 = Clock::now();
  Geometry g = geo;  // shares the correction weights; grids are small next to the blocks
  g.config = out.config;
  BlockSystem sys = assemble_system(g, out.phases, out.basis);
  out.stored_entries = sys.stored_entries();
  out.timings.fill = seconds_since(t0);
  note(1, fmt::format("fill: {:.2f} s, {} stored entries", out.timings.fill, out.stored_entries));

  t0 = Clock::now();
  FoldedSystem folded = fold_radiation(std::move(sys));
  ReducedSystem reduced = schur_reduce(folded, {out.config.svd_tol, out.config.row_scaling});
  const CVec f = folded.f;
  const CVec eta = block_lu_solve(reduced, f);
  out.solution = recover_proxies(folded, reduced, eta);
  out.timings.solve = seconds_since(t0);
  note(1, fmt::format("solve: {:.2f} s", out.timings.solve));

  out.timings.pre = geo.build_seconds;
  out.timings.total = out.timings.pre + out.timings.fill + out.timings.solve;
  out.flux_error = flux_error(out.solution, out.config, out.basis);
  return out;
}

SolveResult solve(const Geometry& geo) { return solve(geo, geo.config.phi_inc, geo.config.theta_inc); }

SolveResult solve(const StackConfig& config, const std::string& cache_dir) {
  const Geometry geo = build_geometry(config, cache_dir);
  note(1, fmt::format("geometry and corrections: {:.2f} s", geo.build_seconds));
  return solve(geo);
}

std::size_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stoull(line.substr(6)) * 1024;
  }
  return 0;
}

}  // namespace qpml
