#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "finvert/charpoly.hpp"
#include "finvert/deconv1d.hpp"
#include "finvert/signal.hpp"

namespace finvert {

/// Centered 2D kernel with odd dimensions; value(s, t) with s the vertical
/// (row) offset and t the horizontal (column) offset.
class Kernel2D {
 public:
  Kernel2D(std::size_t width, std::size_t height, std::vector<double> values);

  static Kernel2D unitary() { return Kernel2D(1, 1, {1.0}); }
  /// cs runs down the columns (vertical), ct along the rows (horizontal).
  static Kernel2D outer(const Sequence& cs, const Sequence& ct);
  static Kernel2D outer(const Filter& cs, const Filter& ct);
  /// Sampled exp(-(s^2 + t^2) / (2 sigma^2)) on [-radius, radius]^2, unit sum.
  static Kernel2D gaussian(std::size_t radius, double sigma);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::ptrdiff_t radius_x() const noexcept { return static_cast<std::ptrdiff_t>(width_ / 2); }
  std::ptrdiff_t radius_y() const noexcept { return static_cast<std::ptrdiff_t>(height_ / 2); }
  const std::vector<double>& values() const noexcept { return values_; }

  double at(std::ptrdiff_t s, std::ptrdiff_t t) const noexcept {
    return values_[static_cast<std::size_t>((s + radius_y()) * static_cast<std::ptrdiff_t>(width_) + t + radius_x())];
  }

  double sum() const noexcept;
  Kernel2D normalized() const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> values_;
};

struct SeparableFactors {
  Filter cs;  // column (vertical) direction
  Filter ct;  // row (horizontal) direction
  double residual = 0.0;
};

inline constexpr double kDefaultSeparableTol = 1e-8;

/// Best rank-1 split of `k` into two symmetric filters. Throws NotSeparable
/// when ||k - cs (x) ct|| / ||k|| > tol.
SeparableFactors separate(const Kernel2D& k, double tol = kDefaultSeparableTol);

/// Same-size 2D convolution with boundary extension.
Image filter_image(const Image& img, const Kernel2D& k, BoundaryPolicy boundary = BoundaryPolicy::Reflect);

/// Explicit 2D inverse ZS (x) ZT of an invertible separable kernel.
Kernel2D inverse_kernel2d(const SeparableFactors& f, double epsTrunc = kDefaultEpsTrunc);

enum class AxisOrder { RowsFirst, ColumnsFirst };

struct Deconv2DReport {
  DeconvReport rows;     // pass along each row (filter ct)
  DeconvReport columns;  // pass along each column (filter cs)
  std::size_t widthLoss = 0;
  std::size_t heightLoss = 0;
  bool partiallyRestored = false;
  std::optional<double> interiorRms;
};

struct Deconv2DResult {
  Image image;
  /// Input coordinates of output pixel (0, 0).
  std::ptrdiff_t offsetX = 0;
  std::ptrdiff_t offsetY = 0;
  /// Exactly restored region, in output coordinates, inclusive.
  std::ptrdiff_t interiorX0 = 0, interiorY0 = 0, interiorX1 = -1, interiorY1 = -1;
  Deconv2DReport report{};

  /// Maps a ground-truth image (input coordinates) into the output space.
  Image factor_space(const Image& truth) const;

  // One representative 1D run per axis; every row (column) shares it.
  std::optional<DeconvResult> rowPass{};
  std::optional<DeconvResult> columnPass{};
  AxisOrder order = AxisOrder::RowsFirst;
};

Deconv2DResult deconvolve2d(const Image& img, const SeparableFactors& f, const DeconvOptions& opts = {},
                            AxisOrder order = AxisOrder::RowsFirst);
Deconv2DResult deconvolve2d(const Image& img, const Kernel2D& k, const DeconvOptions& opts = {},
                            AxisOrder order = AxisOrder::RowsFirst);
/// Same, and fills report.interiorRms against `truth`.
Deconv2DResult deconvolve2d(const Image& img, const Kernel2D& k, const DeconvOptions& opts, const Image& truth);

}  // namespace finvert
