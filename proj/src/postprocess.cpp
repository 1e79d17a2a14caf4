#include "qpml/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fill.hpp"
#include "qpml/diagnostics.hpp"

namespace qpml {

namespace {

double incident_flux(const StackConfig& config) { return config.k.front() * std::abs(std::cos(config.phi_inc)); }

}  // namespace

double flux_error(const CVec& a_u, const CVec& a_d, const StackConfig& config, const RayleighBasis& basis) {
  const double inc = incident_flux(config);
  double out = 0.0;
  for (int c = 0; c < basis.count(); ++c) {
    if (basis.propagating_u[c]) out += basis.k_u[c].real() * std::norm(a_u(c));
    if (basis.propagating_d[c]) out += basis.k_d[c].real() * std::norm(a_d(c));
  }
  return std::abs((out - inc) / inc);
}

double flux_error(const Solution& sol, const StackConfig& config, const RayleighBasis& basis) {
  return flux_error(sol.a_u, sol.a_d, config, basis);
}

PowerFractions power_fractions(const Solution& sol, const StackConfig& config, const RayleighBasis& basis) {
  const double inc = incident_flux(config);
  PowerFractions pf;
  pf.reflected.assign(basis.count(), 0.0);
  pf.transmitted.assign(basis.count(), 0.0);
  for (int c = 0; c < basis.count(); ++c) {
    if (basis.propagating_u[c]) pf.reflected[c] = basis.k_u[c].real() * std::norm(sol.a_u(c)) / inc;
    if (basis.propagating_d[c]) pf.transmitted[c] = basis.k_d[c].real() * std::norm(sol.a_d(c)) / inc;
    pf.reflectance += pf.reflected[c];
    pf.transmittance += pf.transmitted[c];
  }
  return pf;
}

int layer_of(const StackConfig& config, const Vec3& p) {
  const int I = config.interface_count();
  for (int i = 0; i < I; ++i) {
    const double g = config.interfaces[i].height(p.x(), p.y(), config.d);
    if (p.z() > g) return i;
    if (p.z() == g) return -1;
  }
  return I;
}

FieldGrid eval_field(const SolveResult& result, const Geometry& geo, const std::vector<Vec3>& points) {
  const StackConfig& cfg = result.config;
  const Solution& sol = result.solution;
  const int I = cfg.interface_count();
  const double h = cfg.d / cfg.n();
  const double exclusion = 5.0 * h;
  const detail::PhaseTable phase(result.phases);
  FieldGrid fg;
  fg.points = points;
  const int count = static_cast<int>(points.size());
  fg.layer.assign(count, -1);
  fg.masked.assign(count, false);
  fg.scattered.assign(count, cplx{});
  fg.total.assign(count, cplx{});
  parallel_for(0, count, cfg.threads, [&](int t) {
    const Vec3& p = points[t];
    const int j = layer_of(cfg, p);
    if (j < 0) throw SolverError(fmt::format("field point {} lies on an interface", t));
    fg.layer[t] = j;
    bool near = false;
    for (int i = 0; i < I; ++i)
      near = near || std::abs(p.z() - cfg.interfaces[i].height(p.x(), p.y(), cfg.d)) < exclusion;
    fg.masked[t] = near;
    if (near) return;
    const double k = cfg.k[j];
    cplx u{};
    for (int i : {j - 1, j}) {
      if (i < 0 || i >= I) continue;
      const SurfaceGrid& g = geo.surfaces[i];
      for (int ly = -1; ly <= 1; ++ly)
        for (int lx = -1; lx <= 1; ++lx) {
          const Vec3 shift(cfg.d * lx, cfg.d * ly, 0.0);
          cplx part{};
          for (int n = 0; n < g.size(); ++n) {
            const KernelSet ks = kernel_set(k, p - (g.nodes[n] + shift), Vec3::UnitZ(), g.normals[n]);
            part += (ks.D * sol.tau[i](n) + ks.S * sol.sigma[i](n)) * g.w[n];
          }
          u += phase(lx, ly) * part;
        }
    }
    const ProxyGrid& pg = geo.proxies[j];
    for (int q = 0; q < pg.size(); ++q)
      u += sol.c[j](q) * proxy_basis(k, pg.points[q], pg.normals[q], p).value;
    fg.scattered[t] = u;
    fg.total[t] = j == 0 ? u + incident_wave(cfg, p).value : u;
  });
  return fg;
}

std::vector<Vec3> xz_plane(double d, double y0, double z_lo, double z_hi, int nx, int nz) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(nx) * nz);
  for (int b = 0; b < nz; ++b)
    for (int a = 0; a < nx; ++a) {
      const double x = -0.5 * d + (a + 0.5) * d / nx;
      const double z = z_lo + (b + 0.5) * (z_hi - z_lo) / nz;
      pts.emplace_back(x, y0, z);
    }
  return pts;
}

std::pair<double, double> fold_incidence(double phi, double theta) {
  if (phi <= pi) return {phi, theta};
  return {2.0 * pi - phi, std::fmod(theta + pi, 2.0 * pi)};
}

SpectraTable spectra_sweep(const StackConfig& config, const std::vector<double>& phis, const std::string& cache_dir,
                           const std::function<void(const SpectraRow&)>& progress) {
  SpectraTable table;
  table.K = config.K;
  const Geometry geo = build_geometry(config, cache_dir);
  table.timings.pre = geo.build_seconds;
  for (double phi : phis) {
    SpectraRow row;
    row.phi_sweep = phi;
    std::tie(row.phi_inc, row.theta_inc) = fold_incidence(phi, config.theta_inc);
    try {
      const SolveResult r = solve(geo, row.phi_inc, row.theta_inc);
      row.powers = power_fractions(r.solution, r.config, r.basis);
      row.reflectance = row.powers.reflectance;
      row.transmittance = row.powers.transmittance;
      row.flux_error = r.flux_error;
      row.ok = true;
      table.timings.fill += r.timings.fill;
      table.timings.solve += r.timings.solve;
    } catch (const std::exception& e) {
      row.error = e.what();
      warn(fmt::format("spectra angle {:.6f} failed: {}", phi, e.what()));
    }
    if (progress) progress(row);
    table.rows.push_back(std::move(row));
  }
  table.timings.total = table.timings.pre + table.timings.fill + table.timings.solve;
  return table;
}

ConvergenceTable convergence_study(const StackConfig& config, const std::string& variable, std::vector<int> values,
                                   const std::vector<Vec3>& probes, const std::string& cache_dir) {
  if (variable != "N" && variable != "P")
    throw ConfigError(fmt::format("convergence variable must be N or P, got '{}'", variable));
  if (values.empty()) throw ConfigError("convergence study needs at least one value");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  ConvergenceTable table;
  table.variable = variable;
  table.probes = probes;
  for (int v : values) {
    StackConfig c = config;
    if (variable == "N") {
      c.N = v;
    } else {
      c.P = v;
      c.n_theta = c.n_phi = 0;
    }
    const Geometry geo = build_geometry(c, cache_dir);
    const SolveResult r = solve(geo);
    const FieldGrid fg = eval_field(r, geo, probes);
    ConvergenceRow row;
    row.value = v;
    row.flux_error = r.flux_error;
    row.timings = r.timings;
    row.probe_values = fg.total;
    table.rows.push_back(std::move(row));
    note(1, fmt::format("convergence {} = {}: flux error {:.3e}", variable, v, r.flux_error));
  }
  const auto& ref = table.rows.back().probe_values;
  for (auto& row : table.rows) {
    row.probe_error = 0.0;
    for (std::size_t p = 0; p < ref.size(); ++p)
      row.probe_error = std::max(row.probe_error, std::abs(row.probe_values[p] - ref[p]));
  }
  return table;
}

}  // namespace qpml
