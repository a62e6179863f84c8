#include "finvert/charpoly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "finvert/error.hpp"

namespace finvert {

namespace {

using cplx = std::complex<double>;

constexpr double kSymmetryTol = 1e-12;
constexpr double kRootResidualTol = 1e-11;
constexpr double kReconvolutionTol = 1e-9;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string format_poly(const std::vector<double>& coeffs) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? ", " : "") << coeffs[k];
  os << "] (ascending powers)";
  return os.str();
}

struct QEval {
  cplx value;
  cplx derivative;
  double roundoff;  // a-priori bound on the rounding error of `value`
};

QEval evaluate(const std::vector<double>& q, cplx x) {
  cplx v = 0.0, d = 0.0;
  double mag = 0.0;
  const double ax = std::abs(x);
  for (std::size_t k = q.size(); k-- > 0;) {
    d = d * x + v;
    v = v * x + q[k];
    mag = mag * ax + std::abs(q[k]);
  }
  return {v, d, 8.0 * std::numeric_limits<double>::epsilon() * mag};
}

double residual_bound(cplx p, std::size_t degree) {
  return kRootResidualTol * (1.0 + std::pow(std::abs(p), static_cast<double>(degree)));
}

cplx newton_polish(const std::vector<double>& q, cplx r) {
  QEval e = evaluate(q, r);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(e.value) == 0.0 || std::abs(e.derivative) == 0.0) break;
    const cplx next = r - e.value / e.derivative;
    const QEval en = evaluate(q, next);
    if (!(std::abs(en.value) < std::abs(e.value))) break;
    const double step = std::abs(next - r);
    r = next;
    e = en;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(r))) break;
  }
  return r;
}

std::vector<cplx> companion_roots(const std::vector<double>& q) {
  const auto n = static_cast<Eigen::Index>(q.size() - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -q[static_cast<std::size_t>(i)];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "root finder did not converge for Q = " + format_poly(q));
  }
  std::vector<cplx> roots;
  roots.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

// Multiple roots come back from the eigen-solver as a small cloud whose
// centroid is far more accurate than any member. Replace a cloud by its
// centroid when the centroid evaluates no worse than the members.
void merge_clusters(const std::vector<double>& q, std::vector<cplx>& roots) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = 1.0 + std::max(std::abs(roots[i]), std::abs(roots[j]));
      if (std::abs(roots[i] - roots[j]) < 1e-3 * scale) parent[find(i)] = find(j);
    }
  }
  for (std::size_t rep = 0; rep < n; ++rep) {
    if (find(rep) != rep) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (find(i) == rep) members.push_back(i);
    if (members.size() < 2) continue;
    cplx mean = 0.0;
    double worst = 0.0;
    for (std::size_t i : members) {
      mean += roots[i];
      worst = std::max(worst, std::abs(evaluate(q, roots[i]).value));
    }
    mean /= static_cast<double>(members.size());
    const QEval at_mean = evaluate(q, mean);
    if (std::abs(at_mean.value) <= std::max(worst, at_mean.roundoff)) {
      for (std::size_t i : members) roots[i] = mean;
    }
  }
}

int class_rank(FactorClass k) {
  switch (k) {
    case FactorClass::Invertible: return 0;
    case FactorClass::CriticalPlus:
    case FactorClass::CriticalMinus: return 1;
    case FactorClass::Oscillatory: return 2;
  }
  return 3;
}

}  // namespace

const char* to_string(FactorClass klass) noexcept {
  switch (klass) {
    case FactorClass::Invertible: return "Invertible";
    case FactorClass::CriticalPlus: return "CriticalPlus";
    case FactorClass::CriticalMinus: return "CriticalMinus";
    case FactorClass::Oscillatory: return "Oscillatory";
  }
  return "Unknown";
}

Filter::Filter(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw Error(ErrorCode::InvalidInput, "filter: no coefficients");
  if (coeffs_.size() % 2 == 0) {
    throw Error(ErrorCode::InvalidInput,
                "filter: symmetric filter needs odd length, got " + std::to_string(coeffs_.size()));
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidInput, "filter: non-finite coefficient");
  }
  const double scale = max_abs(coeffs_);
  if (scale == 0.0) throw Error(ErrorCode::InvalidInput, "filter: all coefficients are zero");
  const std::size_t n = coeffs_.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = coeffs_[k], b = coeffs_[n - 1 - k];
    if (std::abs(a - b) > kSymmetryTol * scale) {
      std::ostringstream os;
      os.precision(17);
      os << "filter: not symmetric, c(" << -static_cast<long>(n / 2 - k) << ") = " << a << " but c("
         << static_cast<long>(n / 2 - k) << ") = " << b;
      throw Error(ErrorCode::InvalidInput, os.str());
    }
    coeffs_[k] = coeffs_[n - 1 - k] = 0.5 * (a + b);
  }
  while (coeffs_.size() > 1 && coeffs_.front() == 0.0) {
    coeffs_.erase(coeffs_.begin());
    coeffs_.pop_back();
  }
}

Filter Filter::from_half(const std::vector<double>& half) {
  if (half.empty()) throw Error(ErrorCode::InvalidInput, "filter: empty half list");
  std::vector<double> full(half.rbegin(), half.rend());
  full.insert(full.end(), half.begin() + 1, half.end());
  return Filter(std::move(full));
}

double Filter::at(std::ptrdiff_t k) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(order());
  if (k < -n || k > n) return 0.0;
  return coeffs_[static_cast<std::size_t>(k + n)];
}

Sequence Filter::as_sequence() const { return Sequence(coeffs_, static_cast<std::ptrdiff_t>(order())); }

cplx QPolynomial::operator()(cplx x) const { return evaluate(coeffs, x).value; }

FactorClass classify(double p) {
  if (!std::isfinite(p)) throw Error(ErrorCode::InvalidInput, "classify: non-finite p");
  const double a = std::abs(p);
  if (std::abs(a - 2.0) < kClassifyEps) return p > 0 ? FactorClass::CriticalPlus : FactorClass::CriticalMinus;
  return a > 2.0 ? FactorClass::Invertible : FactorClass::Oscillatory;
}

FactorClass classify(cplx p) {
  if (p.imag() == 0.0) return classify(p.real());
  const cplx disc = std::sqrt(p * p - 4.0);
  const cplx u1 = 0.5 * (-p + disc);
  const cplx u2 = 0.5 * (-p - disc);
  const double smaller = std::min(std::abs(u1), std::abs(u2));
  if (std::abs(smaller - 1.0) > kClassifyEps) return FactorClass::Invertible;
  return classify(p.real());
}

CharPolynomial char_polynomial(const Filter& f) {
  CharPolynomial pc;
  const double g = f.gain();
  pc.coeffs.reserve(f.coefficients().size());
  for (double c : f.coefficients()) pc.coeffs.push_back(c / g);
  return pc;
}

QPolynomial reduce_to_q(const CharPolynomial& pc) {
  const auto& c = pc.coeffs;
  if (c.empty() || c.size() % 2 == 0) {
    throw Error(ErrorCode::InvalidInput, "reduce_to_q: characteristic polynomial must have even degree");
  }
  const std::size_t n = (c.size() - 1) / 2;
  const double scale = max_abs(c);
  if (std::abs(c.back() - 1.0) > kSymmetryTol || std::abs(c.front() - 1.0) > kSymmetryTol) {
    throw Error(ErrorCode::InvalidInput, "reduce_to_q: polynomial is not monic with unit constant term");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(c[k] - c[2 * n - k]) > kSymmetryTol * scale) {
      throw Error(ErrorCode::InvalidInput, "reduce_to_q: polynomial is not palindromic: " + format_poly(c));
    }
  }

  // P(x)/x^N = c[N] + sum_k c[N+k] (x^k + x^-k); with y = x + 1/x the terms
  // x^k + x^-k = G_k(y) follow G_0 = 2, G_1 = y, G_{k+1} = y G_k - G_{k-1}.
  std::vector<double> r(n + 1, 0.0);
  r[0] = c[n];
  std::vector<double> g_prev{2.0};
  std::vector<double> g_cur{0.0, 1.0};
  for (std::size_t k = 1; k <= n; ++k) {
    const double ck = c[n + k];
    for (std::size_t j = 0; j < g_cur.size(); ++j) r[j] += ck * g_cur[j];
    std::vector<double> g_next(g_cur.size() + 1, 0.0);
    for (std::size_t j = 0; j < g_cur.size(); ++j) g_next[j + 1] = g_cur[j];
    for (std::size_t j = 0; j < g_prev.size(); ++j) g_next[j] -= g_prev[j];
    g_prev = std::move(g_cur);
    g_cur = std::move(g_next);
  }

  // R(y) = prod (y + p_k); Q(x) = prod (x - p_k) = (-1)^N R(-x).
  QPolynomial q;
  q.coeffs.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) q.coeffs[k] = ((n + k) % 2 == 0) ? r[k] : -r[k];
  return q;
}

std::vector<ElementaryFactor> find_factor_params(const QPolynomial& q) {
  const auto& qc = q.coeffs;
  if (qc.size() < 2) throw Error(ErrorCode::InvalidInput, "find_factor_params: degree must be at least 1");
  if (qc.back() != 1.0) throw Error(ErrorCode::InvalidInput, "find_factor_params: polynomial must be monic");
  for (double c : qc) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidInput, "find_factor_params: non-finite coefficient");
  }
  const std::size_t n = q.degree();

  std::vector<cplx> roots;
  if (n == 1) {
    roots.push_back(-qc[0]);
  } else {
    roots = companion_roots(qc);
    for (auto& r : roots) r = newton_polish(qc, r);
    merge_clusters(qc, roots);
  }

  for (auto& r : roots) {
    if (std::abs(r.imag()) <= 1e-9 * (1.0 + std::abs(r.real()))) r = r.real();
  }

  std::vector<ElementaryFactor> factors(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) factors[i].p = roots[i];

  std::vector<bool> paired(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].imag() <= 0.0 || paired[i]) continue;
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (paired[j] || roots[j].imag() >= 0.0) continue;
      const double dist = std::abs(roots[j] - std::conj(roots[i]));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (!best || best_dist > 1e-6 * (1.0 + std::abs(roots[i]))) {
      throw Error(ErrorCode::ConvergenceFailure, "find_factor_params: complex root without conjugate for Q = " +
                                                     format_poly(qc));
    }
    const cplx avg = 0.5 * (roots[i] + std::conj(roots[*best]));
    factors[i].p = avg;
    factors[*best].p = std::conj(avg);
    factors[i].conjugatePartner = *best;
    factors[*best].conjugatePartner = i;
    paired[i] = paired[*best] = true;
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (factors[i].p.imag() != 0.0 && !factors[i].conjugatePartner) {
      throw Error(ErrorCode::ConvergenceFailure, "find_factor_params: unpaired complex root for Q = " +
                                                     format_poly(qc));
    }
  }

  for (auto& f : factors) {
    const double res = std::abs(evaluate(qc, f.p).value);
    if (!(res <= residual_bound(f.p, n))) {
      std::ostringstream os;
      os.precision(17);
      os << "find_factor_params: root " << f.p << " has residual " << res << " for Q = " << format_poly(qc);
      throw Error(ErrorCode::ConvergenceFailure, os.str());
    }
    f.klass = classify(f.p);
    if (f.klass == FactorClass::CriticalPlus) f.p = 2.0;
    if (f.klass == FactorClass::CriticalMinus) f.p = -2.0;
  }
  return factors;
}

namespace {

// max_k |prod_k - target_k| over the product of [1, p, 1] factors.
double product_error(const std::vector<cplx>& params, const std::vector<double>& target) {
  const auto prod = elementary_product(params);
  double err = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) err = std::max(err, std::abs(prod[k] - target[k]));
  return err;
}

// Gauss-Newton on the factor parameters against the monic filter itself.
// Roots found on Q inherit the rounding of the Q reduction, which tight
// clusters amplify; this pulls the product back onto the filter. Steps are
// kept only while they lower the coefficient error, so exact inputs stay put.
void refine_against_filter(std::vector<ElementaryFactor>& factors, const std::vector<double>& monic) {
  const std::size_t n = factors.size();
  if (n < 2) return;
  std::vector<cplx> params(n);
  for (std::size_t i = 0; i < n; ++i) params[i] = factors[i].p;
  double err = product_error(params, monic);

  for (int iter = 0; iter < 8 && err > 0.0; ++iter) {
    const auto prod = elementary_product(params);
    // Unknowns p_j; equations are the coefficients of x^1 .. x^N (the rest
    // follow by symmetry). d prod / d p_j is x times the product without j.
    Eigen::MatrixXcd jac(n, n);
    Eigen::VectorXcd rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<cplx> others;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) others.push_back(params[i]);
      const auto partial = elementary_product(others);
      for (std::size_t k = 1; k <= n; ++k) jac(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j)) = partial[k - 1];
    }
    for (std::size_t k = 1; k <= n; ++k) rhs(static_cast<Eigen::Index>(k - 1)) = monic[k] - prod[k];
    const Eigen::VectorXcd step = jac.completeOrthogonalDecomposition().solve(rhs);
    if (!step.allFinite()) break;

    std::vector<cplx> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = params[i] + step(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < n; ++i) {
      if (factors[i].p.imag() == 0.0) {
        next[i] = next[i].real();
      } else if (factors[i].p.imag() > 0.0) {
        const std::size_t j = *factors[i].conjugatePartner;
        const cplx avg = 0.5 * (next[i] + std::conj(next[j]));
        next[i] = avg;
        next[j] = std::conj(avg);
      }
    }
    const double next_err = product_error(next, monic);
    if (!(next_err < err)) break;
    params = std::move(next);
    err = next_err;
  }
  for (std::size_t i = 0; i < n; ++i) {
    factors[i].p = params[i];
    factors[i].klass = classify(params[i]);
    if (factors[i].klass == FactorClass::CriticalPlus) factors[i].p = 2.0;
    if (factors[i].klass == FactorClass::CriticalMinus) factors[i].p = -2.0;
  }
}

}  // namespace

Decomposition decompose(const Filter& f) {
  Decomposition d;
  d.gain = f.gain();
  if (f.order() == 0) return d;

  const CharPolynomial pc = char_polynomial(f);
  auto factors = find_factor_params(reduce_to_q(pc));
  refine_against_filter(factors, pc.coeffs);
  std::vector<std::size_t> order(factors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& fa = factors[a];
    const auto& fb = factors[b];
    if (class_rank(fa.klass) != class_rank(fb.klass)) return class_rank(fa.klass) < class_rank(fb.klass);
    if (fa.p.real() != fb.p.real()) return fa.p.real() > fb.p.real();
    return fa.p.imag() > fb.p.imag();
  });
  std::vector<std::size_t> position(factors.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  for (std::size_t i : order) {
    auto fac = factors[i];
    if (fac.conjugatePartner) fac.conjugatePartner = position[*fac.conjugatePartner];
    d.factors.push_back(fac);
  }

  const Filter back = reconvolve(d);
  const auto& want = f.coefficients();
  const auto& got = back.coefficients();
  if (got.size() != want.size()) {
    throw Error(ErrorCode::ConvergenceFailure, "decompose: reconvolved filter has the wrong order");
  }
  double err = 0.0;
  for (std::size_t k = 0; k < want.size(); ++k) err = std::max(err, std::abs(got[k] - want[k]));
  d.residual = err / max_abs(want);
  if (!(d.residual <= kReconvolutionTol)) {
    std::ostringstream os;
    os << "decompose: reconvolution residual " << d.residual << " exceeds " << kReconvolutionTol;
    throw Error(ErrorCode::ConvergenceFailure, os.str());
  }
  return d;
}

std::vector<cplx> elementary_product(const std::vector<cplx>& params) {
  std::vector<cplx> acc{1.0};
  for (const cplx& p : params) {
    std::vector<cplx> next(acc.size() + 2, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] += p * acc[i];
      next[i + 2] += acc[i];
    }
    acc = std::move(next);
  }
  return acc;
}

Filter reconvolve(const Decomposition& d) {
  std::vector<cplx> params;
  params.reserve(d.factors.size());
  for (std::size_t i = 0; i < d.factors.size(); ++i) {
    const auto& f = d.factors[i];
    if (f.p.imag() != 0.0) {
      if (!f.conjugatePartner || *f.conjugatePartner >= d.factors.size()) {
        throw Error(ErrorCode::InvalidInput, "reconvolve: complex factor without a conjugate partner");
      }
      const auto& partner = d.factors[*f.conjugatePartner];
      if (partner.conjugatePartner != i ||
          std::abs(partner.p - std::conj(f.p)) > 1e-12 * (1.0 + std::abs(f.p))) {
        throw Error(ErrorCode::InvalidInput, "reconvolve: conjugate partner does not match");
      }
    }
    params.push_back(f.p);
  }
  const auto product = elementary_product(params);
  double scale = 1.0;
  for (const auto& c : product) scale = std::max(scale, std::abs(c.real()));
  std::vector<double> coeffs;
  coeffs.reserve(product.size());
  for (const auto& c : product) {
    if (std::abs(c.imag()) > 1e-10 * scale) {
      throw Error(ErrorCode::InvalidInput, "reconvolve: imaginary residue from unpaired complex factors");
    }
    coeffs.push_back(d.gain * c.real());
  }
  return Filter(std::move(coeffs));
}

}  // namespace finvert
