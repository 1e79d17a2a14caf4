#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qpml/geometry.hpp"

namespace qpml::cli {

enum class JobKind { solve, converge, spectra, field };

const char* to_string(JobKind kind);
JobKind job_kind(const std::string& name);

struct ConvergeParams {
  std::string variable = "N";
  std::vector<int> values;
  std::vector<Vec3> probes;
};

/// Either an explicit angle list or `count` equispaced angles strictly
/// inside (phi_min, phi_max).
struct SpectraParams {
  std::vector<double> phi;
  double phi_min = 0.5 * pi, phi_max = 1.5 * pi;
  int count = 0;

  std::vector<double> angles() const;
};

/// An x-z slice at fixed y. The z range defaults to the span of the wall
/// panels when both bounds are equal.
struct FieldParams {
  double y = 0.0;
  double z_min = 0.0, z_max = 0.0;
  int nx = 64, nz = 64;
};

struct JobConfig {
  JobKind kind = JobKind::solve;
  std::string preset;
  std::string output_dir;
  int verbosity = 0;
  std::string cache_dir;
  StackConfig stack;
  ConvergeParams converge;
  SpectraParams spectra;
  FieldParams field;

  bool operator==(const JobConfig& other) const;
};

/// Checks `doc` against the bundled job schema. Returns one message per
/// violation, each prefixed with its JSON pointer.
std::vector<std::string> schema_errors(const nlohmann::json& doc);
const nlohmann::json& job_schema();

/// Schema check, conversion and StackConfig::validate; ConfigError on failure.
JobConfig parse_job(const nlohmann::json& doc);
JobConfig load_job(const std::string& path);
/// Canonical form: every field written, angles at full precision.
nlohmann::json to_json(const JobConfig& job);
/// FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const JobConfig& job);

std::vector<std::string> preset_names();
/// Complete job document for a named preset; ConfigError listing the known
/// names otherwise.
nlohmann::json preset(const std::string& name);

/// Overrides from the command line, applied after the file is read.
struct Overrides {
  std::string out;
  int threads = 0;
  int order = 0;
};

/// Runs a job and writes its artifacts. Returns the process exit code: 0 on
/// success, 2 for configuration errors, 3 for solver failures, 4 for I/O
/// failures. Errors are reported on stderr as one JSON line.
int run(JobKind kind, const std::string& config_path, const std::string& preset_name, const Overrides& overrides);
int run(JobConfig job);

}  // namespace qpml::cli
