#include "finvert/separable2d.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "finvert/error.hpp"

namespace finvert {

namespace {

std::vector<double> symmetrized(std::vector<double> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n / 2; ++i) v[i] = v[n - 1 - i] = 0.5 * (v[i] + v[n - 1 - i]);
  return v;
}

/// Runs the 1D pipeline over every row of `img`; all rows share one lattice.
std::pair<Image, DeconvResult> rows_pass(const Image& img, const Filter& f, const DeconvOptions& opts) {
  std::optional<DeconvResult> first;
  std::vector<double> pixels;
  std::size_t out_width = 0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    DeconvResult r = deconvolve(Sequence(img.row(y), 0), f, opts);
    const auto& v = r.signal.values();
    out_width = v.size();
    pixels.insert(pixels.end(), v.begin(), v.end());
    if (!first) first = std::move(r);
  }
  return {Image(out_width, img.height(), std::move(pixels)), std::move(*first)};
}

Image transpose(const Image& img) {
  std::vector<double> out(img.width() * img.height());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) out[x * img.height() + y] = img(x, y);
  return Image(img.height(), img.width(), std::move(out));
}

Image map_rows(const Image& img, const DeconvResult& pass) {
  std::vector<double> pixels;
  std::size_t w = 0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    const Sequence s = pass.factor_space(Sequence(img.row(y), 0));
    w = s.size();
    pixels.insert(pixels.end(), s.values().begin(), s.values().end());
  }
  return Image(w, img.height(), std::move(pixels));
}

}  // namespace

Kernel2D::Kernel2D(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ == 0 || height_ == 0 || width_ % 2 == 0 || height_ % 2 == 0) {
    throw Error(ErrorCode::InvalidInput, "kernel2d: dimensions must be odd and positive");
  }
  if (values_.size() != width_ * height_) throw Error(ErrorCode::ShapeMismatch, "kernel2d: value count mismatch");
  double scale = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "kernel2d: non-finite value");
    scale = std::max(scale, std::abs(v));
  }
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (std::abs(values_[i] - values_[n - 1 - i]) > 1e-12 * scale) {
      throw Error(ErrorCode::InvalidInput, "kernel2d: not symmetric under (s,t) -> (-s,-t)");
    }
  }
}

Kernel2D Kernel2D::outer(const Sequence& cs, const Sequence& ct) {
  std::vector<double> v;
  v.reserve(cs.size() * ct.size());
  for (double a : cs.values())
    for (double b : ct.values()) v.push_back(a * b);
  return Kernel2D(ct.size(), cs.size(), std::move(v));
}

Kernel2D Kernel2D::outer(const Filter& cs, const Filter& ct) { return outer(cs.as_sequence(), ct.as_sequence()); }

Kernel2D Kernel2D::gaussian(std::size_t radius, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidInput, "gaussian kernel: sigma must be positive");
  std::vector<double> g(2 * radius + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = static_cast<double>(i) - static_cast<double>(radius);
    g[i] = std::exp(-s * s / (2.0 * sigma * sigma));
    total += g[i];
  }
  for (double& x : g) x /= total;
  const Sequence seq(g, static_cast<std::ptrdiff_t>(radius));
  return outer(seq, seq);
}

double Kernel2D::sum() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

Kernel2D Kernel2D::normalized() const {
  const double s = sum();
  if (s == 0.0) throw Error(ErrorCode::InvalidInput, "kernel2d: cannot normalize a zero-sum kernel");
  std::vector<double> v = values_;
  for (double& x : v) x /= s;
  return Kernel2D(width_, height_, std::move(v));
}

SeparableFactors separate(const Kernel2D& k, double tol) {
  const auto h = static_cast<Eigen::Index>(k.height());
  const auto w = static_cast<Eigen::Index>(k.width());
  Eigen::MatrixXd m(h, w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c) m(r, c) = k.values()[static_cast<std::size_t>(r * w + c)];
  const double total = m.norm();
  if (total == 0.0) throw Error(ErrorCode::InvalidInput, "separate: zero kernel");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma = svd.singularValues()(0);
  std::vector<double> u(static_cast<std::size_t>(h)), v(static_cast<std::size_t>(w));
  for (Eigen::Index i = 0; i < h; ++i) u[static_cast<std::size_t>(i)] = svd.matrixU()(i, 0) * std::sqrt(sigma);
  for (Eigen::Index i = 0; i < w; ++i) v[static_cast<std::size_t>(i)] = svd.matrixV()(i, 0) * std::sqrt(sigma);
  if (u[u.size() / 2] < 0.0) {
    for (double& x : u) x = -x;
    for (double& x : v) x = -x;
  }

  auto residual_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c = 0; c < w; ++c) {
        const double d = m(r, c) - a[static_cast<std::size_t>(r)] * b[static_cast<std::size_t>(c)];
        acc += d * d;
      }
    return std::sqrt(acc) / total;
  };

  u = symmetrized(std::move(u));
  v = symmetrized(std::move(v));
  const double residual = residual_of(u, v);
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "separate: kernel is not separable into symmetric factors (relative residual " << residual << ", tol "
       << tol << ")";
    throw Error(ErrorCode::NotSeparable, os.str());
  }

  Filter cs(u), ct(v);
  // Split the scale so both factors share the magnitude of c(N).
  const double alpha = std::sqrt(std::abs(ct.gain()) / std::abs(cs.gain()));
  for (double& x : u) x *= alpha;
  for (double& x : v) x /= alpha;
  return {Filter(std::move(u)), Filter(std::move(v)), residual};
}

Image filter_image(const Image& img, const Kernel2D& k, BoundaryPolicy boundary) {
  Image out(img.width(), img.height(), 0.0);
  const auto ry = k.radius_y(), rx = k.radius_x();
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t s = -ry; s <= ry; ++s) {
        const auto sy = boundary_index(static_cast<std::ptrdiff_t>(y) - s, img.height(), boundary);
        if (!sy) continue;
        for (std::ptrdiff_t t = -rx; t <= rx; ++t) {
          const auto sx = boundary_index(static_cast<std::ptrdiff_t>(x) - t, img.width(), boundary);
          if (!sx) continue;
          acc += k.at(s, t) * img(*sx, *sy);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

Kernel2D inverse_kernel2d(const SeparableFactors& f, double epsTrunc) {
  const InverseFilter zs = build_inverse(decompose(f.cs), epsTrunc);
  const InverseFilter zt = build_inverse(decompose(f.ct), epsTrunc);
  return Kernel2D::outer(zs.z, zt.z);
}

Deconv2DResult deconvolve2d(const Image& img, const SeparableFactors& f, const DeconvOptions& opts,
                            AxisOrder order) {
  Deconv2DResult result{.image = img};
  result.order = order;
  if (order == AxisOrder::RowsFirst) {
    auto [after_rows, row_run] = rows_pass(img, f.ct, opts);
    auto [after_cols_t, col_run] = rows_pass(transpose(after_rows), f.cs, opts);
    result.image = transpose(after_cols_t);
    result.rowPass = std::move(row_run);
    result.columnPass = std::move(col_run);
  } else {
    auto [after_cols_t, col_run] = rows_pass(transpose(img), f.cs, opts);
    auto [after_rows, row_run] = rows_pass(transpose(after_cols_t), f.ct, opts);
    result.image = std::move(after_rows);
    result.rowPass = std::move(row_run);
    result.columnPass = std::move(col_run);
  }
  const DeconvResult& rp = *result.rowPass;
  const DeconvResult& cp = *result.columnPass;
  result.offsetX = rp.signal.first();
  result.offsetY = cp.signal.first();
  result.interiorX0 = rp.interiorFirst - result.offsetX;
  result.interiorX1 = rp.interiorLast - result.offsetX;
  result.interiorY0 = cp.interiorFirst - result.offsetY;
  result.interiorY1 = cp.interiorLast - result.offsetY;
  result.report.rows = rp.report;
  result.report.columns = cp.report;
  result.report.widthLoss = img.width() - result.image.width();
  result.report.heightLoss = img.height() - result.image.height();
  result.report.partiallyRestored = rp.report.partiallyRestored || cp.report.partiallyRestored;
  return result;
}

Deconv2DResult deconvolve2d(const Image& img, const Kernel2D& k, const DeconvOptions& opts, AxisOrder order) {
  if (img.width() <= k.width() || img.height() <= k.height()) {
    throw Error(ErrorCode::InsufficientData, "deconvolve2d: image smaller than the kernel");
  }
  return deconvolve2d(img, separate(k), opts, order);
}

Deconv2DResult deconvolve2d(const Image& img, const Kernel2D& k, const DeconvOptions& opts, const Image& truth) {
  Deconv2DResult r = deconvolve2d(img, k, opts);
  if (r.interiorX1 >= r.interiorX0 && r.interiorY1 >= r.interiorY0) {
    const Image ref = r.factor_space(truth);
    const auto w = static_cast<std::size_t>(r.interiorX1 - r.interiorX0 + 1);
    const auto h = static_cast<std::size_t>(r.interiorY1 - r.interiorY0 + 1);
    const auto x0 = static_cast<std::size_t>(r.interiorX0), y0 = static_cast<std::size_t>(r.interiorY0);
    r.report.interiorRms = rms(r.image.crop(x0, y0, w, h), ref.crop(x0, y0, w, h));
  }
  return r;
}

Image Deconv2DResult::factor_space(const Image& truth) const {
  if (!rowPass || !columnPass) throw Error(ErrorCode::InvalidInput, "factor_space: no deconvolution result");
  if (order == AxisOrder::RowsFirst) return transpose(map_rows(transpose(map_rows(truth, *rowPass)), *columnPass));
  return map_rows(transpose(map_rows(transpose(truth), *columnPass)), *rowPass);
}

}  // namespace finvert
