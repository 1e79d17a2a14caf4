#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qpml {

/// One term a·cos(2π(p x + q y)/d) + b·sin(2π(p x + q y)/d) of a height profile.
struct FourierTerm {
  int p = 0;
  int q = 0;
  double a = 0.0;
  double b = 0.0;
};

/// Height and its first and second partial derivatives at a point.
struct HeightSample {
  double g = 0.0;
  double gx = 0.0, gy = 0.0;
  double gxx = 0.0, gxy = 0.0, gyy = 0.0;
};

/// Doubly periodic interface z = offset + Σ terms, in physical coordinates
/// with period d in both x and y. Derivatives are analytic.
class Surface {
 public:
  Surface() = default;
  Surface(std::vector<FourierTerm> terms, double offset, std::string family = "fourier");

  static Surface flat(double offset);
  /// amplitude·sin(2πx/d)·cos(2πy/d) + offset.
  static Surface sincos(double amplitude, double offset);

  HeightSample sample(double x, double y, double d) const;
  double height(double x, double y, double d) const;

  /// g(x0, y0) − g(x, y) evaluated through sum-to-product identities, which
  /// keeps full relative accuracy when the two points are close.
  double height_difference(double x0, double y0, double x, double y, double d) const;

  /// Extremes of the height over one period, found by dense sampling followed
  /// by Newton polishing of the best samples.
  double min_height(double d) const;
  double max_height(double d) const;

  /// Hash of the shape only (terms, not the vertical offset); equal hashes mean
  /// the surfaces differ by a vertical translation.
  std::uint64_t shape_hash() const;

  const std::vector<FourierTerm>& terms() const { return terms_; }
  double offset() const { return offset_; }
  const std::string& family() const { return family_; }
  bool is_flat() const { return terms_.empty(); }

  /// Parameters of the named family, for serialization (amplitude for sincos).
  double family_amplitude() const { return amplitude_; }

 private:
  double extreme(double d, double sign) const;

  std::vector<FourierTerm> terms_;
  double offset_ = 0.0;
  std::string family_ = "flat";
  double amplitude_ = 0.0;
};

/// FNV-1a over raw bytes; stable across runs and platforms of equal endianness.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace qpml
