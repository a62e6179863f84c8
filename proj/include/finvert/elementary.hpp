#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include "finvert/charpoly.hpp"
#include "finvert/signal.hpp"

namespace finvert {

inline constexpr double kDefaultEpsTrunc = 1e-12;

/// Transfer matrix of the three-term recursion z(t+1) = -p z(t) - z(t-1),
/// acting on row vectors (z(n), z(n-1)) from the right.
struct TransferMatrix {
  std::array<std::array<double, 2>, 2> b;
  /// Eigenvalues, |u1| <= |u2|; u1 u2 = 1 and u1 + u2 = -p.
  std::complex<double> u1, u2;
  /// Left eigenvectors (u, 1).
  std::array<std::complex<double>, 2> v1, v2;
  /// True for p = +-2, where u1 = u2 and only one eigenvector exists.
  bool defective = false;

  double det() const noexcept { return b[0][0] * b[1][1] - b[0][1] * b[1][0]; }
};

struct InverseFilter {
  Sequence z;
  double truncationBound = 0.0;
  bool pseudo = false;
};

struct KernelBasis {
  Sequence k1;
  Sequence k2;
};

TransferMatrix transfer_matrix(double p);

/// Closed-form inverse of [1, p, 1] for |p| > 2: z(t) = z(0) u1^|t| with
/// z(0) = 1/(2 u1 + p), truncated at the first |z(t)| < epsTrunc.
InverseFilter invert_elementary(double p, double epsTrunc = kDefaultEpsTrunc);

/// Same closed form for a complex parameter (|u1| < 1); the result is complex.
std::vector<std::complex<double>> invert_elementary_complex(std::complex<double> p, double epsTrunc,
                                                            double* truncationBound = nullptr);

/// Real inverse of the length-5 product [1,p,1] * [1,conj(p),1].
InverseFilter invert_conjugate_pair(std::complex<double> p, double epsTrunc = kDefaultEpsTrunc);

/// Bounded two-sided solution z(t) = sin(phi |t|) / (2 sin phi), cos phi = -p/2,
/// for |t| <= halfLength. Requires |p| < 2.
InverseFilter pseudo_inverse(double p, std::size_t halfLength);

/// Two independent solutions of x(n-1) + p x(n) + x(n+1) = 0 on n = 0..length-1.
KernelBasis kernel_basis(double p, std::size_t length);

}  // namespace finvert
