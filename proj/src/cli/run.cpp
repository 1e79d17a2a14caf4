#include <chrono>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>

#include "qpml/cli.hpp"
#include "qpml/diagnostics.hpp"
#include "qpml/output.hpp"
#include "qpml/pipeline.hpp"
#include "qpml/postprocess.hpp"

extern "C" void openblas_set_num_threads(int);

namespace qpml::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

json timings_json(const Timings& t) {
  return {{"T_pre", t.pre}, {"T_fill", t.fill}, {"T_solve", t.solve}, {"T_total", t.total}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

json complex_list(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

json powers_json(const SolveResult& r) {
  const PowerFractions pf = power_fractions(r.solution, r.config, r.basis);
  return {{"reflectance", pf.reflectance}, {"transmittance", pf.transmittance}};
}

void run_solve(const JobConfig& job, const fs::path& out, const Provenance& prov, json& report) {
  const SolveResult r = solve(job.stack, job.cache_dir);
  write_rayleigh_csv((out / "rayleigh.csv").string(), r, prov);
  report["timings"] = timings_json(r.timings);
  report["E_flux"] = r.flux_error;
  report["stored_block_bytes"] = r.stored_entries * sizeof(cplx);
  report["power"] = powers_json(r);
}

void run_converge(const JobConfig& job, const fs::path& out, const Provenance& prov, json& report) {
  const ConvergenceTable t =
      convergence_study(job.stack, job.converge.variable, job.converge.values, job.converge.probes, job.cache_dir);
  write_convergence_csv((out / "convergence.csv").string(), t, prov);
  Timings sum;
  json rows = json::array();
  for (const auto& row : t.rows) {
    sum.pre += row.timings.pre;
    sum.fill += row.timings.fill;
    sum.solve += row.timings.solve;
    rows.push_back({{job.converge.variable, row.value},
                    {"probe_error", row.probe_error},
                    {"E_flux", row.flux_error},
                    {"probe_values", complex_list(row.probe_values)}});
  }
  sum.total = sum.pre + sum.fill + sum.solve;
  report["timings"] = timings_json(sum);
  report["E_flux"] = t.rows.back().flux_error;
  report["rows"] = rows;
}

void run_spectra(const JobConfig& job, const fs::path& out, const Provenance& prov, json& report) {
  const auto angles = job.spectra.angles();
  if (angles.empty()) throw ConfigError("spectra job needs 'phi' or a positive 'count'");
  const SpectraTable t = spectra_sweep(job.stack, angles, job.cache_dir, [](const SpectraRow& row) {
    note(1, fmt::format("phi = {:.6f}: R = {:.8f}, T = {:.8f}, E_flux = {:.2e}", row.phi_sweep, row.reflectance,
                        row.transmittance, row.flux_error));
  });
  write_spectra_csv((out / "spectra.csv").string(), t, make_rayleigh_basis(job.stack), prov);
  double worst = 0.0;
  int failed = 0;
  for (const auto& row : t.rows) {
    if (row.ok) worst = std::max(worst, row.flux_error);
    else ++failed;
  }
  report["timings"] = timings_json(t.timings);
  report["E_flux"] = worst;
  report["angles"] = t.rows.size();
  report["failed_angles"] = failed;
}

void run_field(const JobConfig& job, const fs::path& out, const Provenance& prov, json& report) {
  const Geometry geo = build_geometry(job.stack, job.cache_dir);
  const SolveResult r = solve(geo);
  double z0 = job.field.z_min, z1 = job.field.z_max;
  if (z0 == z1) {
    z0 = job.stack.bottom_elevation();
    z1 = job.stack.top_elevation();
  }
  const auto t0 = Clock::now();
  const FieldGrid fg = eval_field(r, geo, xz_plane(job.stack.d, job.field.y, z0, z1, job.field.nx, job.field.nz));
  const double d = job.stack.d;
  write_field_bin((out / "field.bin").string(), fg,
                  {static_cast<std::uint32_t>(job.field.nx), 1u, static_cast<std::uint32_t>(job.field.nz)},
                  {-0.5 * d, 0.5 * d, job.field.y, job.field.y, z0, z1}, prov);
  write_rayleigh_csv((out / "rayleigh.csv").string(), r, prov);
  Timings t = r.timings;
  report["timings"] = timings_json(t);
  report["T_field"] = std::chrono::duration<double>(Clock::now() - t0).count();
  report["E_flux"] = r.flux_error;
  report["stored_block_bytes"] = r.stored_entries * sizeof(cplx);
  report["power"] = powers_json(r);
}

int fail(const char* kind, int code, const std::string& message) {
  std::cerr << json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << std::endl;
  return code;
}

// Maps exceptions to exit codes and machine-readable stderr lines.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return fail("config", 2, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail("config", 2, e.what());
  } catch (const IoError& e) {
    return fail("io", 4, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("io", 4, e.what());
  } catch (const SolverError& e) {
    return fail("solver", 3, e.what());
  } catch (const std::exception& e) {
    return fail("solver", 3, e.what());
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

}  // namespace

int run(JobConfig job) {
  return guarded([&] {
    if (job.output_dir.empty()) throw ConfigError("no output directory given");
    set_verbosity(job.verbosity);
    openblas_set_num_threads(std::max(1, job.stack.threads));
    const auto t0 = Clock::now();
    const fs::path out(job.output_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", out.string(), ec.message()));

    const Provenance prov{config_hash(job)};
    json report = {{"qpml_version", prov.code_version}, {"config_hash", prov.config_hash}, {"job", to_string(job.kind)}};
    take_warnings();
    switch (job.kind) {
      case JobKind::solve: run_solve(job, out, prov, report); break;
      case JobKind::converge: run_converge(job, out, prov, report); break;
      case JobKind::spectra: run_spectra(job, out, prov, report); break;
      case JobKind::field: run_field(job, out, prov, report); break;
    }
    report["wall_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    report["peak_rss_bytes"] = peak_rss_bytes();
    report["warnings"] = take_warnings();
    report["config"] = to_json(job);
    write_json(out / "report.json", report);
    return 0;
  });
}

int run(JobKind kind, const std::string& config_path, const std::string& preset_name, const Overrides& overrides) {
  JobConfig job;
  const int code = guarded([&] {
    json doc;
    json file = config_path.empty() ? json() : read_json(config_path);
    std::string base = preset_name;
    if (base.empty() && file.is_object() && file.contains("preset")) base = file["preset"].get<std::string>();
    if (!base.empty()) {
      doc = preset(base);
      if (!file.is_null()) doc.merge_patch(file);
    } else if (!file.is_null()) {
      doc = std::move(file);
    } else {
      throw ConfigError("either --config or --preset is required");
    }
    if (!doc.is_object()) throw ConfigError("job config must be a JSON object");
    doc["job"] = to_string(kind);
    if (!overrides.out.empty()) doc["output_dir"] = overrides.out;
    if (overrides.threads > 0) doc["threads"] = overrides.threads;
    if (overrides.order > 0) doc["discretization"]["order"] = overrides.order;
    job = parse_job(doc);
    return 0;
  });
  return code != 0 ? code : run(std::move(job));
}

}  // namespace qpml::cli
