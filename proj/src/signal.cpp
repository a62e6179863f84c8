#include "finvert/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "finvert/error.hpp"

namespace finvert {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::UseKernelPath: return "UseKernelPath";
    case ErrorCode::TrivialKernel: return "TrivialKernel";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
  }
  return "Unknown";
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite sample");
  }
}

}  // namespace

Sequence::Sequence(std::vector<double> values, std::ptrdiff_t origin)
    : values_(std::move(values)), origin_(origin) {
  if (values_.empty()) throw Error(ErrorCode::InvalidInput, "sequence: empty");
  require_finite(values_, "sequence");
}

Sequence Sequence::unitary() { return Sequence({1.0}, 0); }

Sequence Sequence::window(std::ptrdiff_t from, std::ptrdiff_t to) const {
  if (to < from) throw Error(ErrorCode::InvalidInput, "sequence window: empty range");
  std::vector<double> out(static_cast<std::size_t>(to - from + 1));
  for (std::ptrdiff_t t = from; t <= to; ++t) out[static_cast<std::size_t>(t - from)] = at(t);
  return Sequence(std::move(out), -from);
}

Image::Image(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) throw Error(ErrorCode::InvalidInput, "image: zero dimension");
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::ShapeMismatch, "image: pixel count " + std::to_string(pixels_.size()) +
                                              " != " + std::to_string(width_) + "x" + std::to_string(height_));
  }
  require_finite(pixels_, "image");
}

Image::Image(std::size_t width, std::size_t height, double fill)
    : Image(width, height, std::vector<double>(width * height, fill)) {}

std::vector<double> Image::row(std::size_t y) const {
  auto begin = pixels_.begin() + static_cast<std::ptrdiff_t>(y * width_);
  return {begin, begin + static_cast<std::ptrdiff_t>(width_)};
}

std::vector<double> Image::column(std::size_t x) const {
  std::vector<double> out(height_);
  for (std::size_t y = 0; y < height_; ++y) out[y] = (*this)(x, y);
  return out;
}

Image Image::crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const {
  if (x0 + w > width_ || y0 + h > height_) throw Error(ErrorCode::InvalidInput, "image crop: out of bounds");
  std::vector<double> out;
  out.reserve(w * h);
  for (std::size_t y = y0; y < y0 + h; ++y)
    for (std::size_t x = x0; x < x0 + w; ++x) out.push_back((*this)(x, y));
  return Image(w, h, std::move(out));
}

std::optional<std::size_t> boundary_index(std::ptrdiff_t i, std::size_t n, BoundaryPolicy policy) {
  const auto len = static_cast<std::ptrdiff_t>(n);
  if (i >= 0 && i < len) return static_cast<std::size_t>(i);
  switch (policy) {
    case BoundaryPolicy::Zero:
      return std::nullopt;
    case BoundaryPolicy::Periodic: {
      std::ptrdiff_t m = i % len;
      return static_cast<std::size_t>(m < 0 ? m + len : m);
    }
    case BoundaryPolicy::Reflect: {
      if (len == 1) return 0;
      const std::ptrdiff_t period = 2 * (len - 1);
      std::ptrdiff_t m = i % period;
      if (m < 0) m += period;
      return static_cast<std::size_t>(m < len ? m : period - m);
    }
  }
  return std::nullopt;
}

Sequence convolve(const Sequence& a, const Sequence& b) {
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(av.size() + bv.size() - 1, 0.0);
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double ai = av[i];
    for (std::size_t j = 0; j < bv.size(); ++j) out[i + j] += ai * bv[j];
  }
  return Sequence(std::move(out), a.origin() + b.origin());
}

Sequence extend(const Sequence& x, BoundaryPolicy policy, std::size_t pad) {
  const std::size_t n = x.size();
  if (policy != BoundaryPolicy::Zero && pad > n - 1) {
    throw Error(ErrorCode::InsufficientData, "extend: pad " + std::to_string(pad) + " exceeds length - 1 = " +
                                                 std::to_string(n - 1));
  }
  return extend_folded(x, policy, pad);
}

Sequence extend_folded(const Sequence& x, BoundaryPolicy policy, std::size_t pad) {
  const std::size_t n = x.size();
  std::vector<double> out(n + 2 * pad, 0.0);
  const auto& v = x.values();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad);
    if (auto j = boundary_index(i, n, policy)) out[k] = v[*j];
  }
  return Sequence(std::move(out), x.origin() + static_cast<std::ptrdiff_t>(pad));
}

double rms(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "rms: sizes differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error(ErrorCode::InvalidInput, "rms: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double rms(const Sequence& a, const Sequence& b) { return rms(std::span<const double>(a.values()), std::span<const double>(b.values())); }

double rms(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::ShapeMismatch, "rms: image shapes differ");
  }
  return rms(std::span<const double>(a.pixels()), std::span<const double>(b.pixels()));
}

}  // namespace finvert
