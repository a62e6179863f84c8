#pragma once

#include <cstddef>

#include "finvert/deconv1d.hpp"
#include "finvert/separable2d.hpp"
#include "finvert/signal.hpp"

namespace finvert {

struct RLOptions {
  std::size_t iterations = 50;
  double guardEps = 1e-12;  // floor of the ratio denominator
  bool clampNonnegative = true;
  /// Reflect repeats the edge sample here, unlike extend().
  BoundaryPolicy boundary = BoundaryPolicy::Reflect;
};

/// Multiplicative Richardson-Lucy iterations starting from x = y. The
/// correction step uses the exact adjoint of the boundary-extended blur, so
/// the total flux sum(x) stays equal to sum(y). Under Reflect and Periodic
/// constant images are fixed points as well.
Image richardson_lucy(const Image& y, const Kernel2D& psf, const RLOptions& opts = {});

struct CompareOptions {
  /// The observation is expected to come from filter_image under the same
  /// boundary policy, so the direct method is measured up to the edges.
  DeconvOptions direct{.boundaryMatched = true};
  RLOptions rl;
};

struct ComparisonRecord {
  double rmsBlurred = 0.0;
  double rmsDirect = 0.0;
  double rmsRL = 0.0;
  /// Direct result against the ground truth mapped into its factor space.
  double rmsDirectFactorSpace = 0.0;
  double runtimeDirectMs = 0.0;
  double runtimeRLMs = 0.0;
  std::size_t iterations = 0;
  /// Common measurement window in input coordinates.
  std::size_t x0 = 0, y0 = 0, width = 0, height = 0;
  Deconv2DReport directReport;
};

struct Comparison {
  ComparisonRecord record;
  Image direct;
  Image rl;
};

/// Runs the direct and RL restorations of `y` and measures both against
/// `truth` on the direct method's exact interior.
Comparison compare_methods(const Image& truth, const Image& y, const Kernel2D& psf, const CompareOptions& opts = {});

}  // namespace finvert
