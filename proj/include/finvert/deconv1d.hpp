#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "finvert/charpoly.hpp"
#include "finvert/elementary.hpp"
#include "finvert/signal.hpp"

namespace finvert {

struct DeconvOptions {
  double epsTrunc = kDefaultEpsTrunc;
  BoundaryPolicy boundary = BoundaryPolicy::Reflect;
  std::size_t trimPerNoninvertibleFactor = 1;
  /// Caller asserts y was blurred under `boundary` itself (as filter_image
  /// does). For Reflect and Periodic the extension is then exact, so the
  /// whole output counts as interior and no boundary guard is needed.
  /// Ignored for Zero, whose extension never matches a blurred signal.
  bool boundaryMatched = false;
};

/// num/den; den == 0 marks an undefined value (degenerate report).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  bool defined() const noexcept { return den != 0; }
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct DeconvReport {
  Decomposition factors;
  std::size_t invertibleCount = 0;
  std::size_t noninvertibleCount = 0;
  /// Always 2 * noninvertibleCount: each non-invertible factor has a 2-D kernel.
  std::size_t lengthLoss = 0;
  Rational nyquistBefore;
  Rational nyquistAfter;
  /// Set when the non-invertible factors use up the whole resolution.
  bool degenerate = false;
  /// Set when critical factors (p = +-2) were left un-inverted.
  bool partiallyRestored = false;
  /// Half-length of the truncated inverse of the invertible part.
  std::size_t inverseHalfSupport = 0;
  /// Samples per side set aside before the non-invertible stage because the
  /// boundary extension makes them unreliable.
  std::size_t boundaryGuard = 0;
  std::optional<double> interiorRms;
};

/// Orthogonal projection onto the complement of a span of sequences.
class KernelProjector {
 public:
  /// Orthonormalizes `vectors` (all the same length). Throws DegenerateBasis
  /// when a vector is numerically dependent on the others.
  explicit KernelProjector(const std::vector<std::vector<double>>& vectors);

  std::size_t length() const noexcept { return length_; }
  std::size_t rank() const noexcept { return basis_.size(); }
  const std::vector<std::vector<double>>& basis() const noexcept { return basis_; }

  void apply(std::span<double> x) const;

 private:
  std::size_t length_ = 0;
  std::vector<std::vector<double>> basis_;
};

struct DeconvResult {
  Sequence signal;
  DeconvReport report;
  /// Lattice range of `signal` on which the restoration is exact.
  std::ptrdiff_t interiorFirst = 0;
  std::ptrdiff_t interiorLast = -1;

  /// Maps a ground-truth signal into the space `signal` lives in: the kernel
  /// components removed by the pipeline are removed from `truth` as well, and
  /// any un-inverted critical factors are applied to it.
  Sequence factor_space(const Sequence& truth) const;

  // Pipeline state needed by factor_space.
  std::ptrdiff_t projectionFirst = 0;
  std::ptrdiff_t projectionLast = -1;
  std::optional<KernelProjector> projector{};
  std::optional<Sequence> unrestored{};
};

/// Convolution of the elementary inverses of an all-invertible decomposition,
/// scaled by 1/gain.
InverseFilter build_inverse(const Decomposition& d, double epsTrunc = kDefaultEpsTrunc);

DeconvResult deconvolve(const Sequence& y, const Filter& f, const DeconvOptions& opts = {});
/// Same, and fills report.interiorRms against `truth` (compared in factor space).
DeconvResult deconvolve(const Sequence& y, const Filter& f, const DeconvOptions& opts, const Sequence& truth);

/// Removes the span{k1, k2} components of x.
Sequence project_out_kernel(const Sequence& x, const KernelBasis& kb);

/// Length and resolution accounting for a signal of `signalLen` samples
/// (signalLen = 2N + 1).
DeconvReport resolution_report(const Decomposition& d, std::size_t signalLen);

}  // namespace finvert
