#include "finvert/elementary.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "finvert/error.hpp"

namespace finvert {

namespace {

using cplx = std::complex<double>;

std::string format_p(double p) {
  std::ostringstream os;
  os.precision(17);
  os << p;
  return os.str();
}

/// Root of u^2 + p u + 1 inside the unit disc, computed without cancellation.
cplx inner_root(cplx p) {
  const cplx disc = std::sqrt(p * p - 4.0);
  // Pick the sign that adds magnitudes; the big root is -(p + s disc)/2.
  const cplx big_a = -0.5 * (p + disc);
  const cplx big_b = -0.5 * (p - disc);
  const cplx big = std::abs(big_a) >= std::abs(big_b) ? big_a : big_b;
  return 1.0 / big;
}

void require_eps(double epsTrunc) {
  if (!(epsTrunc > 0.0) || !std::isfinite(epsTrunc)) {
    throw Error(ErrorCode::InvalidInput, "truncation epsilon must be positive");
  }
}

}  // namespace

TransferMatrix transfer_matrix(double p) {
  if (!std::isfinite(p)) throw Error(ErrorCode::InvalidInput, "transfer_matrix: non-finite p");
  TransferMatrix m;
  m.b = {{{-p, 1.0}, {-1.0, 0.0}}};
  const FactorClass k = classify(p);
  if (k == FactorClass::CriticalPlus || k == FactorClass::CriticalMinus) {
    m.u1 = m.u2 = (p > 0 ? -1.0 : 1.0);
    m.defective = true;
  } else if (k == FactorClass::Invertible) {
    m.u1 = inner_root(p);
    m.u2 = 1.0 / m.u1;
  } else {
    const double phi = std::acos(-p / 2.0);
    m.u1 = std::polar(1.0, phi);
    m.u2 = std::conj(m.u1);
  }
  m.v1 = {m.u1, 1.0};
  m.v2 = {m.u2, 1.0};
  return m;
}

std::vector<cplx> invert_elementary_complex(cplx p, double epsTrunc, double* truncationBound) {
  require_eps(epsTrunc);
  if (classify(p) != FactorClass::Invertible) {
    std::ostringstream os;
    os << "elementary filter with p = " << p << " is not invertible";
    throw Error(ErrorCode::NotInvertible, os.str());
  }
  const cplx u1 = inner_root(p);
  const cplx z0 = 1.0 / (2.0 * u1 + p);
  std::vector<cplx> half{z0};
  cplx zt = z0;
  for (;;) {
    zt *= u1;
    if (std::abs(zt) < epsTrunc) break;
    half.push_back(zt);
  }
  if (truncationBound) *truncationBound = 2.0 * std::abs(zt) / (1.0 - std::abs(u1));
  std::vector<cplx> full(half.rbegin(), half.rend());
  full.insert(full.end(), half.begin() + 1, half.end());
  return full;
}

InverseFilter invert_elementary(double p, double epsTrunc) {
  require_eps(epsTrunc);
  if (!std::isfinite(p) || classify(p) != FactorClass::Invertible) {
    throw Error(ErrorCode::NotInvertible, "elementary filter with p = " + format_p(p) + " is not invertible");
  }
  const double u1 = inner_root(p).real();
  const double z0 = 1.0 / (2.0 * u1 + p);
  std::vector<double> half{z0};
  double zt = z0;
  for (;;) {
    zt *= u1;
    if (std::abs(zt) < epsTrunc) break;
    half.push_back(zt);
  }
  std::vector<double> full(half.rbegin(), half.rend());
  full.insert(full.end(), half.begin() + 1, half.end());
  const auto origin = static_cast<std::ptrdiff_t>(half.size() - 1);
  return {Sequence(std::move(full), origin), 2.0 * std::abs(zt) / (1.0 - std::abs(u1)), false};
}

InverseFilter invert_conjugate_pair(cplx p, double epsTrunc) {
  double bound_a = 0.0, bound_b = 0.0;
  const auto za = invert_elementary_complex(p, epsTrunc, &bound_a);
  const auto zb = invert_elementary_complex(std::conj(p), epsTrunc, &bound_b);
  std::vector<cplx> prod(za.size() + zb.size() - 1, 0.0);
  for (std::size_t i = 0; i < za.size(); ++i)
    for (std::size_t j = 0; j < zb.size(); ++j) prod[i + j] += za[i] * zb[j];
  double scale = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (const auto& c : prod) scale = std::max(scale, std::abs(c.real()));
  for (const auto& c : za) norm_a += std::abs(c);
  for (const auto& c : zb) norm_b += std::abs(c);
  std::vector<double> re;
  re.reserve(prod.size());
  for (const auto& c : prod) {
    if (std::abs(c.imag()) > 1e-10 * std::max(1.0, scale)) {
      throw Error(ErrorCode::ConvergenceFailure, "conjugate-pair inverse has a non-negligible imaginary part");
    }
    re.push_back(c.real());
  }
  const auto origin = static_cast<std::ptrdiff_t>(prod.size() / 2);
  const double bound = (norm_a + bound_a) * (norm_b + bound_b) - norm_a * norm_b;
  return {Sequence(std::move(re), origin), bound, false};
}

InverseFilter pseudo_inverse(double p, std::size_t halfLength) {
  if (!std::isfinite(p)) throw Error(ErrorCode::InvalidInput, "pseudo_inverse: non-finite p");
  if (halfLength < 1) throw Error(ErrorCode::InvalidInput, "pseudo_inverse: halfLength must be >= 1");
  if (classify(p) != FactorClass::Oscillatory) {
    throw Error(ErrorCode::UseKernelPath,
                "pseudo_inverse: |p| = " + format_p(std::abs(p)) + " >= 2 has no bounded pseudo-inverse");
  }
  // The recursion runs in extended precision so the rounded samples stay within
  // the closed-form bound 1/(2 sin phi) over long windows.
  std::vector<double> half(halfLength + 1);
  const long double pl = p;
  long double prev = 0.0L, cur = 0.5L;
  half[0] = 0.0;
  half[1] = 0.5;
  for (std::size_t t = 2; t <= halfLength; ++t) {
    const long double next = -pl * cur - prev;
    prev = cur;
    cur = next;
    half[t] = static_cast<double>(cur);
  }
  std::vector<double> full(half.rbegin(), half.rend());
  full.insert(full.end(), half.begin() + 1, half.end());
  return {Sequence(std::move(full), static_cast<std::ptrdiff_t>(halfLength)), 0.0, true};
}

KernelBasis kernel_basis(double p, std::size_t length) {
  if (length < 3) throw Error(ErrorCode::InvalidInput, "kernel_basis: length must be >= 3");
  const FactorClass k = classify(p);
  std::vector<double> k1(length), k2(length);
  switch (k) {
    case FactorClass::Invertible:
      throw Error(ErrorCode::TrivialKernel, "kernel_basis: p = " + format_p(p) + " is invertible, kernel is {0}");
    case FactorClass::CriticalMinus:
      for (std::size_t n = 0; n < length; ++n) {
        k1[n] = 1.0;
        k2[n] = static_cast<double>(n);
      }
      break;
    case FactorClass::CriticalPlus:
      for (std::size_t n = 0; n < length; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        k1[n] = sign;
        k2[n] = sign * static_cast<double>(n);
      }
      break;
    case FactorClass::Oscillatory: {
      const double phi = std::acos(-p / 2.0);
      for (std::size_t n = 0; n < length; ++n) {
        k1[n] = std::cos(phi * static_cast<double>(n));
        k2[n] = std::sin(phi * static_cast<double>(n));
      }
      break;
    }
  }
  return {Sequence(std::move(k1)), Sequence(std::move(k2))};
}

}  // namespace finvert
