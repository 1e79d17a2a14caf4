#include "qpml/output.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <limits>

#ifndef QPML_VERSION
#define QPML_VERSION "0.0.0"
#endif

namespace qpml {

static_assert(std::endian::native == std::endian::little, "binary outputs assume a little-endian host");

const char* version() { return QPML_VERSION; }

namespace {

constexpr char field_magic[8] = {'Q', 'P', 'M', 'L', 'F', 'L', 'D', '\0'};
constexpr std::uint32_t field_version = 1;

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

void header(std::ofstream& out, const Provenance& prov) {
  out << fmt::format("# qpml {} config {}\n", prov.code_version, prov.config_hash);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError(fmt::format("'{}' is truncated", path));
  return v;
}

}  // namespace

void write_spectra_csv(const std::string& path, const SpectraTable& table, const RayleighBasis& basis,
                       const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  // Only the orders propagating at some angle get columns; the rest are zero throughout.
  std::vector<int> cols;
  for (int c = 0; c < basis.count(); ++c) {
    bool any = false;
    for (const auto& row : table.rows)
      if (row.ok && (row.powers.reflected[c] > 0.0 || row.powers.transmitted[c] > 0.0)) any = true;
    if (any) cols.push_back(c);
  }
  out << "phi_sweep,phi_inc,theta_inc,ok,reflectance,transmittance,flux_error";
  for (int c : cols) {
    const auto [m, n] = basis.order(c);
    out << fmt::format(",R_{}_{},T_{}_{}", m, n, m, n);
  }
  out << ",error\n";
  for (const auto& row : table.rows) {
    out << num(row.phi_sweep) << ',' << num(row.phi_inc) << ',' << num(row.theta_inc) << ',' << (row.ok ? 1 : 0)
        << ',' << num(row.reflectance) << ',' << num(row.transmittance) << ',' << num(row.flux_error);
    for (int c : cols) {
      if (row.ok) out << ',' << num(row.powers.reflected[c]) << ',' << num(row.powers.transmitted[c]);
      else out << ",,";
    }
    std::string err = row.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ' ';
    out << ',' << err << '\n';
  }
  finish(out, path);
}

void write_convergence_csv(const std::string& path, const ConvergenceTable& table, const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << table.variable << ",probe_error,flux_error,t_pre,t_fill,t_solve\n";
  for (const auto& row : table.rows)
    out << row.value << ',' << num(row.probe_error) << ',' << num(row.flux_error) << ',' << num(row.timings.pre)
        << ',' << num(row.timings.fill) << ',' << num(row.timings.solve) << '\n';
  finish(out, path);
}

void write_rayleigh_csv(const std::string& path, const SolveResult& result, const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  const RayleighBasis& b = result.basis;
  const PowerFractions pf = power_fractions(result.solution, result.config, b);
  out << "side,m,n,re_a,im_a,propagating,power\n";
  for (int side = 0; side < 2; ++side)
    for (int c = 0; c < b.count(); ++c) {
      const auto [m, n] = b.order(c);
      const cplx a = side == 0 ? result.solution.a_u(c) : result.solution.a_d(c);
      const bool prop = side == 0 ? b.propagating_u[c] : b.propagating_d[c];
      const double p = side == 0 ? pf.reflected[c] : pf.transmitted[c];
      out << (side == 0 ? "up" : "down") << ',' << m << ',' << n << ',' << num(a.real()) << ',' << num(a.imag())
          << ',' << (prop ? 1 : 0) << ',' << num(p) << '\n';
    }
  finish(out, path);
}

void write_field_bin(const std::string& path, const FieldGrid& grid, const std::array<std::uint32_t, 3>& dims,
                     const std::array<double, 6>& bbox, const Provenance& prov) {
  const std::size_t count = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (count != grid.total.size())
    throw IoError(fmt::format("field grid has {} values, dims say {}", grid.total.size(), count));
  auto out = open_out(path, true);
  out.write(field_magic, sizeof field_magic);
  put(out, field_version);
  for (auto v : dims) put(out, v);
  for (double v : bbox) put(out, v);
  const std::string p = fmt::format("qpml {} config {}", prov.code_version, prov.config_hash);
  put(out, static_cast<std::uint32_t>(p.size()));
  out.write(p.data(), static_cast<std::streamsize>(p.size()));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < count; ++i) {
    const cplx v = grid.masked[i] ? cplx(nan, nan) : grid.total[i];
    put(out, v.real());
    put(out, v.imag());
  }
  finish(out, path);
}

FieldFile read_field_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, field_magic, sizeof magic) != 0)
    throw IoError(fmt::format("'{}' is not a qpml field file", path));
  if (get<std::uint32_t>(in, path) != field_version)
    throw IoError(fmt::format("'{}' has an unsupported version", path));
  FieldFile f;
  for (auto& v : f.dims) v = get<std::uint32_t>(in, path);
  for (auto& v : f.bbox) v = get<double>(in, path);
  f.provenance.resize(get<std::uint32_t>(in, path));
  if (!in.read(f.provenance.data(), static_cast<std::streamsize>(f.provenance.size())))
    throw IoError(fmt::format("'{}' is truncated", path));
  const std::size_t count = static_cast<std::size_t>(f.dims[0]) * f.dims[1] * f.dims[2];
  f.values.resize(count);
  for (auto& v : f.values) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    v = {re, im};
  }
  return f;
}

}  // namespace qpml
