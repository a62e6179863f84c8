#include "finvert/rl_baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "finvert/error.hpp"

namespace finvert {

namespace {

// Reflect here repeats the edge sample (half-sample symmetry). With that rule
// a symmetric normalized psf gives a doubly stochastic operator, which is what
// makes constants fixed points and the flux exactly conserved at once; the
// whole-sample mirror of boundary_index satisfies only one of the two.
std::optional<std::size_t> rl_index(std::ptrdiff_t i, std::size_t n, BoundaryPolicy policy) {
  if (policy != BoundaryPolicy::Reflect) return boundary_index(i, n, policy);
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  if (k >= static_cast<std::ptrdiff_t>(n)) k = period - 1 - k;
  return static_cast<std::size_t>(k);
}

class BlurOperator {
 public:
  BlurOperator(const Kernel2D& psf, std::size_t width, std::size_t height, BoundaryPolicy boundary)
      : psf_(psf), width_(width), height_(height), boundary_(boundary) {}

  std::vector<double> forward(const std::vector<double>& x) const {
    std::vector<double> out(x.size(), 0.0);
    visit([&](std::size_t dst, std::size_t src, double w) { out[dst] += w * x[src]; });
    return out;
  }

  std::vector<double> adjoint(const std::vector<double>& r) const {
    std::vector<double> out(r.size(), 0.0);
    visit([&](std::size_t dst, std::size_t src, double w) { out[src] += w * r[dst]; });
    return out;
  }

 private:
  // Calls fn(dst, src, weight) for every term of (A x)[dst] = sum weight * x[src].
  template <typename Fn>
  void visit(Fn&& fn) const {
    const auto ry = psf_.radius_y(), rx = psf_.radius_x();
    for (std::size_t y = 0; y < height_; ++y) {
      for (std::size_t x = 0; x < width_; ++x) {
        const std::size_t dst = y * width_ + x;
        for (std::ptrdiff_t s = -ry; s <= ry; ++s) {
          const auto sy = rl_index(static_cast<std::ptrdiff_t>(y) - s, height_, boundary_);
          if (!sy) continue;
          for (std::ptrdiff_t t = -rx; t <= rx; ++t) {
            const auto sx = rl_index(static_cast<std::ptrdiff_t>(x) - t, width_, boundary_);
            if (!sx) continue;
            fn(dst, *sy * width_ + *sx, psf_.at(s, t));
          }
        }
      }
    }
  }

  const Kernel2D& psf_;
  std::size_t width_;
  std::size_t height_;
  BoundaryPolicy boundary_;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Image richardson_lucy(const Image& y, const Kernel2D& psf, const RLOptions& opts) {
  if (opts.iterations < 1) throw Error(ErrorCode::InvalidInput, "richardson_lucy: iterations must be >= 1");
  if (!(opts.guardEps > 0.0)) throw Error(ErrorCode::InvalidInput, "richardson_lucy: guardEps must be positive");
  for (double v : y.pixels()) {
    if (v < 0.0) throw Error(ErrorCode::InvalidInput, "richardson_lucy: observed image has negative pixels");
  }
  for (double v : psf.values()) {
    if (v < 0.0) throw Error(ErrorCode::InvalidInput, "richardson_lucy: psf has negative entries");
  }
  if (!(psf.sum() > 0.0)) throw Error(ErrorCode::InvalidInput, "richardson_lucy: psf sum must be positive");

  const Kernel2D kernel = psf.normalized();
  const BlurOperator op(kernel, y.width(), y.height(), opts.boundary);
  const auto& observed = y.pixels();
  std::vector<double> x = observed;
  std::vector<double> ratio(x.size());
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    const std::vector<double> predicted = op.forward(x);
    for (std::size_t i = 0; i < x.size(); ++i) ratio[i] = observed[i] / std::max(predicted[i], opts.guardEps);
    const std::vector<double> correction = op.adjoint(ratio);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] *= correction[i];
      if (opts.clampNonnegative && x[i] < 0.0) x[i] = 0.0;
    }
  }
  return Image(y.width(), y.height(), std::move(x));
}

Comparison compare_methods(const Image& truth, const Image& y, const Kernel2D& psf, const CompareOptions& opts) {
  if (truth.width() != y.width() || truth.height() != y.height()) {
    throw Error(ErrorCode::ShapeMismatch, "compare_methods: truth and observed images differ in shape");
  }
  auto t0 = std::chrono::steady_clock::now();
  const Deconv2DResult direct = deconvolve2d(y, psf, opts.direct);
  const double direct_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  Image rl = richardson_lucy(y, psf, opts.rl);
  const double rl_ms = elapsed_ms(t0);

  if (direct.interiorX1 < direct.interiorX0 || direct.interiorY1 < direct.interiorY0) {
    throw Error(ErrorCode::InsufficientData, "compare_methods: direct restoration has an empty interior");
  }
  ComparisonRecord rec;
  rec.width = static_cast<std::size_t>(direct.interiorX1 - direct.interiorX0 + 1);
  rec.height = static_cast<std::size_t>(direct.interiorY1 - direct.interiorY0 + 1);
  rec.x0 = static_cast<std::size_t>(direct.offsetX + direct.interiorX0);
  rec.y0 = static_cast<std::size_t>(direct.offsetY + direct.interiorY0);
  const auto dx = static_cast<std::size_t>(direct.interiorX0), dy = static_cast<std::size_t>(direct.interiorY0);

  const Image truth_win = truth.crop(rec.x0, rec.y0, rec.width, rec.height);
  const Image direct_win = direct.image.crop(dx, dy, rec.width, rec.height);
  rec.rmsBlurred = rms(y.crop(rec.x0, rec.y0, rec.width, rec.height), truth_win);
  rec.rmsDirect = rms(direct_win, truth_win);
  rec.rmsRL = rms(rl.crop(rec.x0, rec.y0, rec.width, rec.height), truth_win);
  rec.rmsDirectFactorSpace = rms(direct_win, direct.factor_space(truth).crop(dx, dy, rec.width, rec.height));
  rec.runtimeDirectMs = direct_ms;
  rec.runtimeRLMs = rl_ms;
  rec.iterations = opts.rl.iterations;
  rec.directReport = direct.report;
  return {rec, direct.image, std::move(rl)};
}

}  // namespace finvert
