#include <fmt/format.h>
#include <fstream>

#include "qpml/cli.hpp"

namespace qpml::cli {

using nlohmann::json;

namespace {

constexpr int schema_version = 1;

json surface_json(const Surface& s) {
  json j = {{"family", s.family()}, {"offset", s.offset()}};
  if (s.family() == "sincos") {
    j["amplitude"] = s.family_amplitude();
  } else if (s.family() == "fourier") {
    json terms = json::array();
    for (const auto& t : s.terms()) terms.push_back({{"p", t.p}, {"q", t.q}, {"a", t.a}, {"b", t.b}});
    j["terms"] = terms;
  }
  return j;
}

Surface surface_from(const json& j, std::size_t i) {
  const std::string family = j.at("family");
  const double offset = j.at("offset");
  if (family == "flat") return Surface::flat(offset);
  if (family == "sincos") {
    if (!j.contains("amplitude")) throw ConfigError(fmt::format("interface {}: sincos needs an amplitude", i));
    return Surface::sincos(j["amplitude"].get<double>(), offset);
  }
  std::vector<FourierTerm> terms;
  for (const auto& t : j.value("terms", json::array()))
    terms.push_back({t.at("p").get<int>(), t.at("q").get<int>(), t.value("a", 0.0), t.value("b", 0.0)});
  return Surface(std::move(terms), offset, "fourier");
}

template <class T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj[key].get<T>();
}

}  // namespace

const char* to_string(JobKind kind) {
  switch (kind) {
    case JobKind::solve: return "solve";
    case JobKind::converge: return "converge";
    case JobKind::spectra: return "spectra";
    case JobKind::field: return "field";
  }
  return "?";
}

JobKind job_kind(const std::string& name) {
  for (JobKind k : {JobKind::solve, JobKind::converge, JobKind::spectra, JobKind::field})
    if (name == to_string(k)) return k;
  throw ConfigError(fmt::format("unknown job kind '{}'", name));
}

std::vector<double> SpectraParams::angles() const {
  if (!phi.empty()) return phi;
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(phi_min + (i + 0.5) * (phi_max - phi_min) / count);
  return out;
}

bool JobConfig::operator==(const JobConfig& other) const { return to_json(*this) == to_json(other); }

JobConfig parse_job(const json& doc) {
  const auto errors = schema_errors(doc);
  if (!errors.empty()) {
    std::string msg = "job config violates the schema:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  JobConfig job;
  if (doc.contains("job")) job.kind = job_kind(doc["job"]);
  take(doc, "preset", job.preset);
  take(doc, "output_dir", job.output_dir);
  take(doc, "verbosity", job.verbosity);
  take(doc, "cache_dir", job.cache_dir);

  StackConfig& c = job.stack;
  take(doc, "threads", c.threads);
  const json& st = doc["stack"];
  take(st, "d", c.d);
  take(st, "k", c.k);
  take(st, "phi_inc", c.phi_inc);
  take(st, "theta_inc", c.theta_inc);
  for (std::size_t i = 0; i < st["interfaces"].size(); ++i) c.interfaces.push_back(surface_from(st["interfaces"][i], i));
  if (st.contains("z_u")) c.z_u = st["z_u"].get<double>();
  if (st.contains("z_d")) c.z_d = st["z_d"].get<double>();

  const json disc = doc.value("discretization", json::object());
  take(disc, "N", c.N);
  take(disc, "M_w", c.M_w);
  take(disc, "M", c.M);
  take(disc, "P", c.P);
  take(disc, "n_theta", c.n_theta);
  take(disc, "n_phi", c.n_phi);
  take(disc, "K", c.K);
  take(disc, "R_proxy", c.R_proxy);
  take(disc, "order", c.corr_order);

  const json sol = doc.value("solver", json::object());
  take(sol, "svd_tol", c.svd_tol);
  take(sol, "row_scaling", c.row_scaling);
  take(sol, "phase_zd", c.phase_zd);

  const json cv = doc.value("converge", json::object());
  take(cv, "variable", job.converge.variable);
  take(cv, "values", job.converge.values);
  for (const auto& p : cv.value("probes", json::array()))
    job.converge.probes.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());

  const json sp = doc.value("spectra", json::object());
  take(sp, "phi", job.spectra.phi);
  take(sp, "phi_min", job.spectra.phi_min);
  take(sp, "phi_max", job.spectra.phi_max);
  take(sp, "count", job.spectra.count);

  const json fd = doc.value("field", json::object());
  take(fd, "y", job.field.y);
  take(fd, "z_min", job.field.z_min);
  take(fd, "z_max", job.field.z_max);
  take(fd, "nx", job.field.nx);
  take(fd, "nz", job.field.nz);

  c.validate();
  return job;
}

JobConfig load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config '{}'", path));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
  return parse_job(doc);
}

json to_json(const JobConfig& job) {
  const StackConfig& c = job.stack;
  json j;
  j["schema_version"] = schema_version;
  j["job"] = to_string(job.kind);
  j["preset"] = job.preset;
  j["output_dir"] = job.output_dir;
  j["verbosity"] = job.verbosity;
  j["threads"] = c.threads;
  j["cache_dir"] = job.cache_dir;

  json interfaces = json::array();
  for (const auto& s : c.interfaces) interfaces.push_back(surface_json(s));
  j["stack"] = {{"d", c.d}, {"k", c.k}, {"phi_inc", c.phi_inc}, {"theta_inc", c.theta_inc}, {"interfaces", interfaces}};
  if (c.z_u) j["stack"]["z_u"] = *c.z_u;
  if (c.z_d) j["stack"]["z_d"] = *c.z_d;

  j["discretization"] = {{"N", c.N},       {"M_w", c.M_w},         {"M", c.M},
                         {"P", c.P},       {"n_theta", c.n_theta}, {"n_phi", c.n_phi},
                         {"K", c.K},       {"R_proxy", c.R_proxy}, {"order", c.corr_order}};
  j["solver"] = {{"svd_tol", c.svd_tol}, {"row_scaling", c.row_scaling}, {"phase_zd", c.phase_zd}};

  json probes = json::array();
  for (const auto& p : job.converge.probes) probes.push_back({p.x(), p.y(), p.z()});
  j["converge"] = {{"variable", job.converge.variable}, {"values", job.converge.values}, {"probes", probes}};
  j["spectra"] = {{"phi", job.spectra.phi},
                  {"phi_min", job.spectra.phi_min},
                  {"phi_max", job.spectra.phi_max},
                  {"count", job.spectra.count}};
  j["field"] = {{"y", job.field.y},
                {"z_min", job.field.z_min},
                {"z_max", job.field.z_max},
                {"nx", job.field.nx},
                {"nz", job.field.nz}};
  return j;
}

std::string config_hash(const JobConfig& job) {
  // Only what determines the numbers: paths, verbosity and threads are left out.
  json j = to_json(job);
  for (const char* key : {"preset", "output_dir", "verbosity", "threads", "cache_dir"}) j.erase(key);
  const std::string text = j.dump();
  return fmt::format("{:016x}", fnv1a(text.data(), text.size()));
}

}  // namespace qpml::cli
