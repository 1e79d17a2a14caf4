#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <tuple>

#include <fmt/format.h>

#include "qpml/quadrature.hpp"

namespace qpml {

namespace {

static_assert(std::endian::native == std::endian::little, "cache files are written little-endian");

constexpr char magic[8] = {'Q', 'P', 'M', 'L', 'G', 'C', 'W', '\0'};
constexpr std::uint32_t format_version = 1;

using Key = std::tuple<std::uint64_t, int, double, int>;

std::mutex cache_lock;
std::map<Key, std::shared_ptr<const GeometricCorrection>>& memo() {
  static std::map<Key, std::shared_ptr<const GeometricCorrection>> m;
  return m;
}

template <class T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!f) throw IoError("truncated correction cache file");
  return v;
}

}  // namespace

std::string geometric_correction_filename(std::uint64_t shape_hash, int n, int order) {
  return fmt::format("qpml_gc_{:016x}_n{}_p{}.bin", shape_hash, n, order);
}

void save_geometric_correction(const GeometricCorrection& gc, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(fmt::format("cannot write correction cache '{}'", tmp));
    f.write(magic, sizeof magic);
    put(f, format_version);
    put(f, static_cast<std::int32_t>(gc.stencil.order));
    put(f, static_cast<std::int32_t>(gc.n));
    put(f, gc.d);
    put(f, gc.shape_hash);
    put(f, static_cast<std::int32_t>(gc.stencil.radius));
    put(f, static_cast<std::int32_t>(gc.stencil.size()));
    for (int c = 0; c < singular_class_count; ++c) put(f, static_cast<std::int32_t>(gc.stencil.degree[c]));
    for (const auto& o : gc.stencil.offsets) {
      put(f, static_cast<std::int32_t>(o[0]));
      put(f, static_cast<std::int32_t>(o[1]));
    }
    put(f, static_cast<std::uint64_t>(gc.weights.size()));
    f.write(reinterpret_cast<const char*>(gc.weights.data()),
            static_cast<std::streamsize>(gc.weights.size() * sizeof(double)));
    if (!f) throw IoError(fmt::format("failed writing correction cache '{}'", tmp));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot move '{}' into place: {}", tmp, ec.message()));
}

GeometricCorrection load_geometric_correction(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open correction cache '{}'", path));
  char m[8];
  f.read(m, sizeof m);
  if (!f || std::memcmp(m, magic, sizeof m) != 0) throw IoError(fmt::format("'{}' is not a correction cache", path));
  if (get<std::uint32_t>(f) != format_version) throw IoError(fmt::format("'{}' has an unsupported version", path));
  GeometricCorrection gc;
  const int order = get<std::int32_t>(f);
  gc.stencil = stencil_template(order);
  gc.n = get<std::int32_t>(f);
  gc.d = get<double>(f);
  gc.shape_hash = get<std::uint64_t>(f);
  const int radius = get<std::int32_t>(f);
  const int size = get<std::int32_t>(f);
  std::array<int, singular_class_count> degree{};
  for (auto& dg : degree) dg = get<std::int32_t>(f);
  std::vector<std::array<int, 2>> offsets(size);
  for (auto& o : offsets) {
    o[0] = get<std::int32_t>(f);
    o[1] = get<std::int32_t>(f);
  }
  // A file written with a different template is stale.
  if (radius != gc.stencil.radius || degree != gc.stencil.degree || offsets != gc.stencil.offsets)
    throw IoError(fmt::format("'{}' was written with a different stencil template", path));
  const auto count = get<std::uint64_t>(f);
  if (count != static_cast<std::uint64_t>(gc.n) * gc.n * singular_class_count * size)
    throw IoError(fmt::format("'{}' has an inconsistent weight count", path));
  gc.weights.resize(count);
  f.read(reinterpret_cast<char*>(gc.weights.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!f) throw IoError(fmt::format("truncated correction cache '{}'", path));
  return gc;
}

std::shared_ptr<const GeometricCorrection> geometric_correction(const SurfaceGrid& grid, int order,
                                                                int threads, const std::string& cache_dir) {
  const Key key{grid.surface.shape_hash(), grid.n, grid.d, order};
  {
    std::lock_guard<std::mutex> g(cache_lock);
    if (auto it = memo().find(key); it != memo().end()) return it->second;
  }
  std::shared_ptr<const GeometricCorrection> gc;
  std::string path;
  if (!cache_dir.empty()) {
    path = (std::filesystem::path(cache_dir) /
            geometric_correction_filename(grid.surface.shape_hash(), grid.n, order)).string();
    if (std::filesystem::exists(path)) {
      try {
        auto loaded = load_geometric_correction(path);
        if (loaded.d == grid.d) gc = std::make_shared<const GeometricCorrection>(std::move(loaded));
      } catch (const IoError&) {
        gc.reset();  // rebuilt below and overwritten
      }
    }
  }
  if (!gc) {
    gc = std::make_shared<const GeometricCorrection>(build_geometric_correction(grid, order, threads));
    if (!path.empty()) {
      std::filesystem::create_directories(cache_dir);
      save_geometric_correction(*gc, path);
    }
  }
  std::lock_guard<std::mutex> g(cache_lock);
  return memo().emplace(key, gc).first->second;
}

void clear_geometric_correction_cache() {
  std::lock_guard<std::mutex> g(cache_lock);
  memo().clear();
}

}  // namespace qpml
