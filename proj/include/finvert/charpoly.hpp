#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "finvert/signal.hpp"

namespace finvert {

/// Width of the band around |p| = 2 that is treated as critical.
inline constexpr double kClassifyEps = 1e-9;

/// Finite symmetric filter c(-N..N). Symmetric zero pairs at the ends are
/// stripped on construction so that c(N) != 0.
class Filter {
 public:
  explicit Filter(std::vector<double> coefficients);

  /// Builds the filter from c(0), c(1), ..., c(N).
  static Filter from_half(const std::vector<double>& half);
  static Filter unitary() { return Filter({1.0}); }

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  std::size_t order() const noexcept { return (coeffs_.size() - 1) / 2; }
  /// c(N), the normalization divisor of the characteristic polynomial.
  double gain() const noexcept { return coeffs_.back(); }
  double at(std::ptrdiff_t k) const noexcept;

  /// The filter as a sequence centered on t = 0.
  Sequence as_sequence() const;

 private:
  std::vector<double> coeffs_;
};

/// Monic palindromic polynomial, ascending powers: coeffs[k] multiplies x^k.
struct CharPolynomial {
  std::vector<double> coeffs;
};

/// Monic polynomial of degree N whose roots are the factor parameters p(k);
/// ascending powers.
struct QPolynomial {
  std::vector<double> coeffs;

  std::size_t degree() const noexcept { return coeffs.size() - 1; }
  std::complex<double> operator()(std::complex<double> x) const;
};

enum class FactorClass { Invertible, CriticalPlus, CriticalMinus, Oscillatory };

const char* to_string(FactorClass klass) noexcept;

/// Classification of a real elementary filter [1, p, 1].
FactorClass classify(double p);
/// Complex p is invertible iff the roots of u^2 + p u + 1 leave the unit circle.
FactorClass classify(std::complex<double> p);

inline bool is_invertible(FactorClass k) noexcept { return k == FactorClass::Invertible; }

/// One elementary factor [1, p, 1]. Complex parameters come in conjugate pairs
/// and carry the index of their partner within the owning decomposition.
struct ElementaryFactor {
  std::complex<double> p;
  std::optional<std::size_t> conjugatePartner;
  FactorClass klass = FactorClass::Invertible;

  bool is_real() const noexcept { return p.imag() == 0.0; }
};

struct Decomposition {
  double gain = 1.0;
  std::vector<ElementaryFactor> factors;
  /// Max reconvolution error relative to the largest filter coefficient.
  double residual = 0.0;
};

CharPolynomial char_polynomial(const Filter& f);

/// Substitutes y = x + 1/x into P(x)/x^N and returns Q with roots p(k).
QPolynomial reduce_to_q(const CharPolynomial& pc);

/// Roots of Q as elementary factors, conjugate pairs linked, each polished
/// until |Q(p)| <= 1e-11 (1 + |p|^N).
std::vector<ElementaryFactor> find_factor_params(const QPolynomial& q);

/// Factors ordered Invertible, Critical, Oscillatory; within a class by
/// descending real part, conjugate pairs adjacent (positive imaginary first).
Decomposition decompose(const Filter& f);

/// gain * [1,p1,1] * ... * [1,pN,1] as a real filter.
Filter reconvolve(const Decomposition& d);

/// Multiplies the elementary filters [1, p, 1] in complex arithmetic.
std::vector<std::complex<double>> elementary_product(const std::vector<std::complex<double>>& params);

}  // namespace finvert
