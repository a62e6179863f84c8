#include "finvert/deconv1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "finvert/error.hpp"

namespace finvert {

namespace {

using cplx = std::complex<double>;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Sequence scaled(const Sequence& s, double factor) {
  std::vector<double> v = s.values();
  for (double& x : v) x *= factor;
  return Sequence(std::move(v), s.origin());
}

bool is_critical(FactorClass k) {
  return k == FactorClass::CriticalPlus || k == FactorClass::CriticalMinus;
}

/// Kernel vectors of the product of all non-invertible factors on a window of
/// `length` samples. A parameter repeated r times contributes (n - c)^j k(n)
/// for j < r.
std::vector<std::vector<double>> combined_kernel(const std::vector<double>& params, std::size_t length) {
  std::vector<std::pair<double, std::size_t>> groups;
  for (double p : params) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return std::abs(g.first - p) <= 1e-9 * (1.0 + std::abs(p)); });
    if (it == groups.end())
      groups.emplace_back(p, 1);
    else
      ++it->second;
  }
  const double center = 0.5 * static_cast<double>(length - 1);
  std::vector<std::vector<double>> out;
  for (const auto& [p, mult] : groups) {
    const KernelBasis kb = kernel_basis(p, length);
    for (std::size_t j = 0; j < mult; ++j) {
      for (const Sequence* k : {&kb.k1, &kb.k2}) {
        std::vector<double> v = k->values();
        for (std::size_t n = 0; n < length; ++n) v[n] *= std::pow(static_cast<double>(n) - center, static_cast<double>(j));
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

void fill_counts(DeconvReport& r, const Decomposition& d, std::size_t signalLen) {
  r.factors = d;
  r.invertibleCount = 0;
  r.noninvertibleCount = 0;
  for (const auto& f : d.factors) {
    if (is_invertible(f.klass))
      ++r.invertibleCount;
    else
      ++r.noninvertibleCount;
    if (is_critical(f.klass)) r.partiallyRestored = true;
  }
  r.lengthLoss = 2 * r.noninvertibleCount;
  const auto n = static_cast<std::int64_t>(signalLen == 0 ? 0 : (signalLen - 1) / 2);
  const auto m = static_cast<std::int64_t>(r.noninvertibleCount);
  r.nyquistBefore = n > 0 ? Rational{1, 2 * n} : Rational{1, 0};
  r.degenerate = m >= n && m > 0;
  if (n == 0) r.degenerate = true;
  r.nyquistAfter = (n - m > 0) ? Rational{1, 2 * (n - m)} : Rational{1, 0};
}

}  // namespace

KernelProjector::KernelProjector(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) return;
  length_ = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != length_) throw Error(ErrorCode::ShapeMismatch, "kernel projector: basis lengths differ");
    std::vector<double> q = v;
    const double original = norm(q);
    if (original == 0.0) throw Error(ErrorCode::DegenerateBasis, "kernel projector: zero basis vector");
    // Modified Gram-Schmidt, two sweeps.
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const auto& b : basis_) {
        const double c = dot(q, b);
        for (std::size_t i = 0; i < length_; ++i) q[i] -= c * b[i];
      }
    }
    const double remaining = norm(q);
    if (remaining < 1e-8 * original) {
      std::ostringstream os;
      os << "kernel projector: basis vector " << basis_.size() << " is numerically dependent (relative norm "
         << remaining / original << ")";
      throw Error(ErrorCode::DegenerateBasis, os.str());
    }
    for (double& x : q) x /= remaining;
    basis_.push_back(std::move(q));
  }
}

void KernelProjector::apply(std::span<double> x) const {
  if (basis_.empty()) return;
  if (x.size() != length_) throw Error(ErrorCode::ShapeMismatch, "kernel projector: length mismatch");
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (const auto& b : basis_) {
      const double c = dot(x, b);
      for (std::size_t i = 0; i < length_; ++i) x[i] -= c * b[i];
    }
  }
}

Sequence project_out_kernel(const Sequence& x, const KernelBasis& kb) {
  if (kb.k1.size() != x.size() || kb.k2.size() != x.size()) {
    throw Error(ErrorCode::ShapeMismatch, "project_out_kernel: kernel basis length differs from signal length");
  }
  const KernelProjector proj({kb.k1.values(), kb.k2.values()});
  std::vector<double> v = x.values();
  proj.apply(v);
  return Sequence(std::move(v), x.origin());
}

InverseFilter build_inverse(const Decomposition& d, double epsTrunc) {
  std::vector<std::string> offending;
  for (const auto& f : d.factors) {
    if (!is_invertible(f.klass)) {
      std::ostringstream os;
      os.precision(17);
      os << f.p.real();
      offending.push_back(os.str());
    }
  }
  if (!offending.empty()) {
    std::string list;
    for (const auto& s : offending) list += (list.empty() ? "" : ", ") + s;
    throw Error(ErrorCode::NotInvertible, "build_inverse: non-invertible factors p = {" + list + "}");
  }
  if (d.gain == 0.0 || !std::isfinite(d.gain)) throw Error(ErrorCode::InvalidInput, "build_inverse: zero gain");

  Sequence z = Sequence::unitary();
  double z_norm = 1.0, bound = 0.0;
  auto absorb = [&](const InverseFilter& part) {
    double part_norm = 0.0;
    for (double v : part.z.values()) part_norm += std::abs(v);
    bound = (z_norm + bound) * (part_norm + part.truncationBound) - z_norm * part_norm;
    z_norm *= part_norm;
    z = convolve(z, part.z);
  };
  for (std::size_t i = 0; i < d.factors.size(); ++i) {
    const auto& f = d.factors[i];
    if (f.p.imag() == 0.0) {
      absorb(invert_elementary(f.p.real(), epsTrunc));
      continue;
    }
    if (!f.conjugatePartner || *f.conjugatePartner >= d.factors.size()) {
      throw Error(ErrorCode::InvalidInput, "build_inverse: complex factor without a conjugate partner");
    }
    if (f.p.imag() > 0.0) absorb(invert_conjugate_pair(f.p, epsTrunc));
  }
  const double inv_gain = 1.0 / d.gain;
  return {scaled(z, inv_gain), bound * std::abs(inv_gain), false};
}

DeconvReport resolution_report(const Decomposition& d, std::size_t signalLen) {
  DeconvReport r;
  fill_counts(r, d, signalLen);
  return r;
}

DeconvResult deconvolve(const Sequence& y, const Filter& f, const DeconvOptions& opts) {
  if (!(opts.epsTrunc > 0.0)) throw Error(ErrorCode::InvalidInput, "deconvolve: epsTrunc must be positive");
  const std::size_t order = f.order();
  if (y.size() <= 2 * order + 1) {
    throw Error(ErrorCode::InsufficientData, "deconvolve: signal of " + std::to_string(y.size()) +
                                                 " samples is too short for a filter of order " + std::to_string(order));
  }
  const double inv_gain = 1.0 / f.gain();
  const bool matched = opts.boundaryMatched && opts.boundary != BoundaryPolicy::Zero;

  const Decomposition d = decompose(f);
  DeconvReport report;
  fill_counts(report, d, y.size());

  std::vector<ElementaryFactor> invertible;
  std::vector<double> pseudo_params, noninvertible_params;
  std::vector<std::size_t> remap(d.factors.size(), 0);
  for (std::size_t i = 0; i < d.factors.size(); ++i) {
    const auto& fac = d.factors[i];
    if (is_invertible(fac.klass)) {
      remap[i] = invertible.size();
      invertible.push_back(fac);
    } else {
      noninvertible_params.push_back(fac.p.real());
      if (fac.klass == FactorClass::Oscillatory) pseudo_params.push_back(fac.p.real());
    }
  }
  for (auto& fac : invertible)
    if (fac.conjugatePartner) fac.conjugatePartner = remap[*fac.conjugatePartner];

  // Invertible part: exact inverse applied to the boundary-extended signal.
  Sequence v = y;
  std::size_t half_support = 0;
  if (!invertible.empty()) {
    const InverseFilter z = build_inverse(Decomposition{1.0, invertible, 0.0}, opts.epsTrunc);
    half_support = (z.z.size() - 1) / 2;
    const Sequence ext = extend_folded(y, opts.boundary, half_support);
    v = convolve(ext, z.z).window(y.first(), y.last());
  }
  report.inverseHalfSupport = half_support;

  DeconvResult result{.signal = scaled(v, inv_gain), .report = report};
  if (noninvertible_params.empty()) {
    const auto margin = matched ? 0 : static_cast<std::ptrdiff_t>(half_support + order);
    result.interiorFirst = y.first() + margin;
    result.interiorLast = y.last() - margin;
    result.projectionFirst = y.first();
    result.projectionLast = y.last();
    return result;
  }

  // Non-invertible part, restricted to the samples the first stage got right.
  const std::size_t guard = (invertible.empty() || matched) ? 0 : half_support + invertible.size();
  const std::size_t m = noninvertible_params.size();
  const std::size_t trim = m * opts.trimPerNoninvertibleFactor;
  const auto first = y.first() + static_cast<std::ptrdiff_t>(guard);
  const auto last = y.last() - static_cast<std::ptrdiff_t>(guard);
  const std::ptrdiff_t width = last - first + 1;
  if (width < static_cast<std::ptrdiff_t>(std::max<std::size_t>(2 * m + 1, 2 * trim + 1))) {
    throw Error(ErrorCode::InsufficientData, "deconvolve: signal too short after trimming");
  }
  report.boundaryGuard = guard;

  Sequence w = v.window(first, last);
  for (double p : pseudo_params) {
    const InverseFilter z = pseudo_inverse(p, static_cast<std::size_t>(width));
    w = convolve(w, z.z).window(first, last);
  }

  KernelProjector projector(combined_kernel(noninvertible_params, static_cast<std::size_t>(width)));
  std::vector<double> projected = w.values();
  projector.apply(projected);
  const Sequence restored(std::move(projected), w.origin());

  const auto out_first = first + static_cast<std::ptrdiff_t>(trim);
  const auto out_last = last - static_cast<std::ptrdiff_t>(trim);
  result.signal = scaled(restored.window(out_first, out_last), inv_gain);
  result.report = report;
  result.interiorFirst = out_first;
  result.interiorLast = out_last;
  result.projectionFirst = first;
  result.projectionLast = last;
  result.projector = std::move(projector);

  std::vector<cplx> critical;
  for (double p : noninvertible_params)
    if (is_critical(classify(p))) critical.emplace_back(p);
  if (!critical.empty()) {
    std::vector<double> c;
    for (const auto& x : elementary_product(critical)) c.push_back(x.real());
    const auto origin = static_cast<std::ptrdiff_t>(critical.size());
    result.unrestored = Sequence(std::move(c), origin);
  }
  return result;
}

DeconvResult deconvolve(const Sequence& y, const Filter& f, const DeconvOptions& opts, const Sequence& truth) {
  DeconvResult r = deconvolve(y, f, opts);
  if (r.interiorLast >= r.interiorFirst) {
    const Sequence ref = r.factor_space(truth);
    const Sequence got = r.signal.window(r.interiorFirst, r.interiorLast);
    const Sequence want = ref.window(r.interiorFirst, r.interiorLast);
    r.report.interiorRms = rms(got, want);
  }
  return r;
}

Sequence DeconvResult::factor_space(const Sequence& truth) const {
  Sequence t = unrestored ? convolve(truth, *unrestored) : truth;
  Sequence w = t.window(projectionFirst, projectionLast);
  if (projector) {
    std::vector<double> v = w.values();
    projector->apply(v);
    w = Sequence(std::move(v), w.origin());
  }
  return w.window(signal.first(), signal.last());
}

}  // namespace finvert
