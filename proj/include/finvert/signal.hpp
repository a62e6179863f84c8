#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace finvert {

/// A finite real sequence placed on the integer lattice. The stored samples
/// cover t in [first(), last()] with first() = -origin; the origin may fall
/// outside the stored range (trimmed sequences keep their lattice position).
class Sequence {
 public:
  Sequence(std::vector<double> values, std::ptrdiff_t origin = 0);

  /// The unitary sequence I: I(0) = 1, zero elsewhere.
  static Sequence unitary();

  const std::vector<double>& values() const noexcept { return values_; }
  std::ptrdiff_t origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::ptrdiff_t first() const noexcept { return -origin_; }
  std::ptrdiff_t last() const noexcept {
    return static_cast<std::ptrdiff_t>(values_.size()) - 1 - origin_;
  }
  bool contains(std::ptrdiff_t t) const noexcept { return t >= first() && t <= last(); }

  /// Sample at lattice index t; zero outside the support.
  double at(std::ptrdiff_t t) const noexcept {
    return contains(t) ? values_[static_cast<std::size_t>(t + origin_)] : 0.0;
  }

  /// Copy of the samples on [from, to], zero-filled outside the support.
  Sequence window(std::ptrdiff_t from, std::ptrdiff_t to) const;

 private:
  std::vector<double> values_;
  std::ptrdiff_t origin_;
};

/// Row-major grayscale raster.
class Image {
 public:
  Image(std::size_t width, std::size_t height, std::vector<double> pixels);
  Image(std::size_t width, std::size_t height, double fill = 0.0);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

  double operator()(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
  double& operator()(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }

  std::vector<double> row(std::size_t y) const;
  std::vector<double> column(std::size_t x) const;

  /// Sub-image [x0, x0+w) x [y0, y0+h).
  Image crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> pixels_;
};

enum class BoundaryPolicy { Reflect, Zero, Periodic };

/// Maps an out-of-range index into [0, n) according to `policy`.
/// Returns nullopt when the policy supplies a zero sample instead.
std::optional<std::size_t> boundary_index(std::ptrdiff_t i, std::size_t n, BoundaryPolicy policy);

/// Full linear convolution; the output origin is the sum of the input origins.
Sequence convolve(const Sequence& a, const Sequence& b);

/// Pads `pad` samples on each side. Reflect mirrors without repeating the edge
/// sample. Reflect and Periodic need pad <= size - 1.
Sequence extend(const Sequence& x, BoundaryPolicy policy, std::size_t pad);
/// Same without the length limit: Reflect and Periodic keep folding.
Sequence extend_folded(const Sequence& x, BoundaryPolicy policy, std::size_t pad);

/// Root-mean-square difference. Shapes must match; origins are not compared.
double rms(std::span<const double> a, std::span<const double> b);
double rms(const Sequence& a, const Sequence& b);
double rms(const Image& a, const Image& b);

}  // namespace finvert
