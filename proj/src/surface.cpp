#include "qpml/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <tuple>

#include "qpml/types.hpp"

namespace qpml {

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

Surface::Surface(std::vector<FourierTerm> terms, double offset, std::string family)
    : terms_(std::move(terms)), offset_(offset), family_(std::move(family)) {
  std::erase_if(terms_, [](const FourierTerm& t) { return t.a == 0.0 && t.b == 0.0; });
  // A constant cosine term is just an offset.
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->p == 0 && it->q == 0) {
      offset_ += it->a;
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

Surface Surface::flat(double offset) {
  Surface s({}, offset, "flat");
  return s;
}

Surface Surface::sincos(double amplitude, double offset) {
  // sin(a)cos(b) = ½[sin(a+b) + sin(a−b)]
  Surface s({{1, 1, 0.0, 0.5 * amplitude}, {1, -1, 0.0, 0.5 * amplitude}}, offset, "sincos");
  s.amplitude_ = amplitude;
  return s;
}

HeightSample Surface::sample(double x, double y, double d) const {
  HeightSample s;
  s.g = offset_;
  const double w = 2.0 * pi / d;
  for (const auto& t : terms_) {
    const double kx = w * t.p, ky = w * t.q;
    const double th = kx * x + ky * y;
    const double c = std::cos(th), sn = std::sin(th);
    const double v = t.a * c + t.b * sn;   // value
    const double dv = -t.a * sn + t.b * c;  // derivative w.r.t. th
    s.g += v;
    s.gx += kx * dv;
    s.gy += ky * dv;
    s.gxx -= kx * kx * v;
    s.gxy -= kx * ky * v;
    s.gyy -= ky * ky * v;
  }
  return s;
}

double Surface::height(double x, double y, double d) const {
  double g = offset_;
  const double w = 2.0 * pi / d;
  for (const auto& t : terms_) {
    const double th = w * (t.p * x + t.q * y);
    g += t.a * std::cos(th) + t.b * std::sin(th);
  }
  return g;
}

double Surface::height_difference(double x0, double y0, double x, double y, double d) const {
  double dg = 0.0;
  const double w = 2.0 * pi / d;
  for (const auto& t : terms_) {
    const double sum = 0.5 * w * (t.p * (x0 + x) + t.q * (y0 + y));
    const double half = 0.5 * w * (t.p * (x0 - x) + t.q * (y0 - y));
    const double sh = std::sin(half);
    dg += -2.0 * t.a * std::sin(sum) * sh + 2.0 * t.b * std::cos(sum) * sh;
  }
  return dg;
}

double Surface::extreme(double d, double sign) const {
  if (terms_.empty()) return offset_;
  const int n = 96;
  struct Cand {
    double v, x, y;
  };
  std::vector<Cand> cands;
  cands.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = d * (i / double(n) - 0.5), y = d * (j / double(n) - 0.5);
      cands.push_back({sign * height(x, y, d), x, y});
    }
  std::partial_sort(cands.begin(), cands.begin() + 8, cands.end(),
                    [](const Cand& a, const Cand& b) { return a.v > b.v; });
  double best = cands.front().v;
  for (int c = 0; c < 8; ++c) {
    double x = cands[c].x, y = cands[c].y;
    for (int it = 0; it < 30; ++it) {
      const auto s = sample(x, y, d);
      const double det = s.gxx * s.gyy - s.gxy * s.gxy;
      if (std::abs(det) < 1e-300) break;
      const double dx = (s.gyy * s.gx - s.gxy * s.gy) / det;
      const double dy = (s.gxx * s.gy - s.gxy * s.gx) / det;
      if (std::hypot(dx, dy) > 0.5 * d / n) break;  // left the basin
      x -= dx;
      y -= dy;
      if (std::hypot(dx, dy) < 1e-15 * d) break;
    }
    best = std::max(best, sign * height(x, y, d));
  }
  return sign * best;
}

double Surface::min_height(double d) const { return extreme(d, -1.0); }
double Surface::max_height(double d) const { return extreme(d, 1.0); }

std::uint64_t Surface::shape_hash() const {
  auto sorted = terms_;
  std::sort(sorted.begin(), sorted.end(), [](const FourierTerm& a, const FourierTerm& b) {
    return std::tie(a.p, a.q, a.a, a.b) < std::tie(b.p, b.q, b.a, b.b);
  });
  std::uint64_t h = fnv1a("surface-v1", 10);
  for (const auto& t : sorted) {
    h = fnv1a(&t.p, sizeof t.p, h);
    h = fnv1a(&t.q, sizeof t.q, h);
    h = fnv1a(&t.a, sizeof t.a, h);
    h = fnv1a(&t.b, sizeof t.b, h);
  }
  return h;
}

}  // namespace qpml
