// A validator for the subset of JSON Schema (draft-07) used by the job
// schema: type, const, enum, numeric bounds, object and array keywords and
// local $ref.
#include <fmt/format.h>

#include "qpml/cli.hpp"
#include "qpml/schema_text.hpp"

namespace qpml::cli {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& v, const json& s, const std::string& at) {
    if (s.contains("$ref")) {
      const std::string ref = s["$ref"];
      if (ref.rfind("#/", 0) != 0) throw std::logic_error("only local schema references are supported");
      check(v, root_.at(json::json_pointer(ref.substr(1))), at);
      return;
    }
    if (s.contains("type")) {
      const json& t = s["type"];
      bool ok = false;
      if (t.is_array()) {
        for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
      } else {
        ok = has_type(v, t.get<std::string>());
      }
      if (!ok) {
        fail(at, fmt::format("expected {}", t.dump()));
        return;
      }
    }
    if (s.contains("const") && v != s["const"]) fail(at, fmt::format("must equal {}", s["const"].dump()));
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) fail(at, fmt::format("must be one of {}", s["enum"].dump()));
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>())
        fail(at, fmt::format("must be >= {}", s["minimum"].dump()));
      if (s.contains("maximum") && x > s["maximum"].get<double>())
        fail(at, fmt::format("must be <= {}", s["maximum"].dump()));
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        fail(at, fmt::format("must be > {}", s["exclusiveMinimum"].dump()));
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
        fail(at, fmt::format("must be < {}", s["exclusiveMaximum"].dump()));
    }
    if (v.is_object()) object(v, s, at);
    if (v.is_array()) array(v, s, at);
  }

  std::vector<std::string> errors;

 private:
  void fail(const std::string& at, const std::string& what) {
    errors.push_back(fmt::format("{}: {}", at.empty() ? "/" : at, what));
  }

  void object(const json& v, const json& s, const std::string& at) {
    if (s.contains("required"))
      for (const auto& key : s["required"])
        if (!v.contains(key.get<std::string>())) fail(at, fmt::format("missing required field '{}'", key.get<std::string>()));
    const json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (const auto& [key, value] : v.items()) {
      const std::string path = at + "/" + key;
      if (props && props->contains(key)) {
        check(value, (*props)[key], path);
      } else if (s.contains("additionalProperties")) {
        const json& extra = s["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) fail(path, "unknown field");
        } else {
          check(value, extra, path);
        }
      }
    }
  }

  void array(const json& v, const json& s, const std::string& at) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      fail(at, fmt::format("needs at least {} items", s["minItems"].get<std::size_t>()));
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      fail(at, fmt::format("allows at most {} items", s["maxItems"].get<std::size_t>()));
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], fmt::format("{}/{}", at, i));
  }

  const json& root_;
};

}  // namespace

const json& job_schema() {
  static const json schema = json::parse(job_schema_text);
  return schema;
}

std::vector<std::string> schema_errors(const json& doc) {
  Validator v(job_schema());
  v.check(doc, job_schema(), "");
  return std::move(v.errors);
}

}  // namespace qpml::cli
