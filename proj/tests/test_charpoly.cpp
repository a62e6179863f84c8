#include <doctest.h>

#include <algorithm>

#include "finvert/charpoly.hpp"
#include "finvert/error.hpp"
#include "oracles.hpp"

using namespace finvert;

namespace {

std::vector<std::complex<double>> params(const Decomposition& d) {
  std::vector<std::complex<double>> v;
  for (const auto& f : d.factors) v.push_back(f.p);
  return v;
}

// Greedy multiset match; returns the worst distance.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0;
  for (auto x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](auto l, auto r) { return std::abs(l - x) < std::abs(r - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("filter validation") {
  CHECK_THROWS_AS(Filter({1, 2}), Error);
  CHECK_THROWS_AS(Filter({1, 2, 1.5}), Error);
  CHECK_THROWS_AS(Filter({0, 0, 0}), Error);
  CHECK_NOTHROW(Filter({1, 2.3, 1 + 1e-14}));
  const Filter stripped({0, 1, 2.3, 1, 0});
  CHECK(stripped.order() == 1);
  CHECK(stripped.gain() == 1);
  CHECK(Filter::from_half({6.6, 4.3, 1}).coefficients() == std::vector<double>{1, 4.3, 6.6, 4.3, 1});
  const Filter f({3, 6.9, 3});
  CHECK(f.at(0) == 6.9);
  CHECK(f.at(-1) == 3);
  CHECK(f.at(2) == 0);
  CHECK(f.as_sequence().first() == -1);
}

TEST_CASE("char_polynomial examples") {
  CHECK(char_polynomial(Filter({1, 2.3, 1})).coeffs == std::vector<double>{1, 2.3, 1});
  const Filter scaled({2, 4.6, 2});
  CHECK(scaled.gain() == 2);
  const auto pc = char_polynomial(scaled).coeffs;
  CHECK(pc[0] == 1);
  CHECK(pc[1] == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(pc[2] == 1);
  CHECK(char_polynomial(Filter({1, 0, 1})).coeffs == std::vector<double>{1, 0, 1});
}

TEST_CASE("reduce_to_q examples") {
  // N = 1: x - c(0).
  CHECK(reduce_to_q(CharPolynomial{{1, 0.7, 1}}).coeffs == std::vector<double>{-0.7, 1});
  // N = 2 with c(1) = 4.3, c(0) = 6.6: x^2 - 4.3 x + 4.6.
  const auto q2 = reduce_to_q(CharPolynomial{{1, 4.3, 6.6, 4.3, 1}}).coeffs;
  REQUIRE(q2.size() == 3);
  CHECK(q2[2] == 1);
  CHECK(q2[1] == -4.3);
  CHECK(q2[0] == doctest::Approx(4.6).epsilon(1e-15));
  CHECK_THROWS_AS(reduce_to_q(CharPolynomial{{1, 2, 3, 4, 1}}), Error);
  CHECK_THROWS_AS(reduce_to_q(CharPolynomial{{1, 2, 1, 2}}), Error);
}

TEST_CASE("reduce_to_q has the factor parameters as roots") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto ps = oracle::random_vector(rng, n, -5, 5);
    const auto c = oracle::filter_from_params(ps);
    const auto q = reduce_to_q(CharPolynomial{c}).coeffs;
    std::vector<std::complex<double>> roots(ps.begin(), ps.end());
    const auto expect = oracle::poly_from_roots(roots);
    REQUIRE(q.size() == expect.size());
    double scale = 1;
    for (auto e : expect) scale = std::max(scale, std::abs(e));
    for (std::size_t k = 0; k < q.size(); ++k) CHECK(std::abs(q[k] - expect[k].real()) <= 1e-12 * scale);
  }
}

TEST_CASE("find_factor_params examples") {
  auto roots = find_factor_params(QPolynomial{{4.6, -4.3, 1}});
  REQUIRE(roots.size() == 2);
  CHECK(multiset_distance({roots[0].p, roots[1].p}, {2.0, 2.3}) < 1e-12);

  roots = find_factor_params(QPolynomial{{-2.3, 1}});
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].p == std::complex<double>(2.3, 0));

  roots = find_factor_params(QPolynomial{{1, 0, 1}});
  REQUIRE(roots.size() == 2);
  CHECK(multiset_distance({roots[0].p, roots[1].p}, {{0, 1}, {0, -1}}) < 1e-12);
  REQUIRE(roots[0].conjugatePartner.has_value());
  REQUIRE(roots[1].conjugatePartner.has_value());
  CHECK(*roots[0].conjugatePartner == 1);
  CHECK(*roots[1].conjugatePartner == 0);
  CHECK(std::conj(roots[0].p) == roots[1].p);
}

TEST_CASE("find_factor_params residual contract and multiplicity") {
  // (x - 2)^3 (x + 1.5)^2: repeated roots returned with multiplicity.
  const auto coeffs = oracle::poly_from_roots({2, 2, 2, -1.5, -1.5});
  QPolynomial q;
  for (auto c : coeffs) q.coeffs.push_back(c.real());
  const auto roots = find_factor_params(q);
  REQUIRE(roots.size() == 5);
  for (const auto& r : roots) {
    const double bound = 1e-11 * (1 + std::pow(std::abs(r.p), 5.0));
    CHECK(std::abs(q(r.p)) <= bound);
  }
}

TEST_CASE("classification") {
  CHECK(classify(2.3) == FactorClass::Invertible);
  CHECK(classify(1.0) == FactorClass::Oscillatory);
  CHECK(classify(-2.0) == FactorClass::CriticalMinus);
  CHECK(classify(2.0) == FactorClass::CriticalPlus);
  CHECK(classify(2.0 + 5e-10) == FactorClass::CriticalPlus);
  CHECK(classify(2.0 - 5e-10) == FactorClass::CriticalPlus);
  CHECK(classify(2.0 + 2e-9) == FactorClass::Invertible);
  CHECK(classify(-2.0 + 2e-9) == FactorClass::Oscillatory);
  CHECK(classify(-3.0) == FactorClass::Invertible);
  CHECK(classify(0.0) == FactorClass::Oscillatory);
  CHECK(classify(std::complex<double>(0.5, 1.0)) == FactorClass::Invertible);
  CHECK(std::string(to_string(FactorClass::CriticalPlus)) == "CriticalPlus");
}

TEST_CASE("decompose examples") {
  auto d = decompose(Filter({1, 4.3, 6.6, 4.3, 1}));
  CHECK(d.gain == 1);
  REQUIRE(d.factors.size() == 2);
  CHECK(d.factors[0].p.real() == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(d.factors[0].klass == FactorClass::Invertible);
  CHECK(d.factors[1].p.real() == 2.0);
  CHECK(d.factors[1].klass == FactorClass::CriticalPlus);
  CHECK(d.residual <= 1e-9);

  d = decompose(Filter({1, 2, 1}));
  REQUIRE(d.factors.size() == 1);
  CHECK(d.factors[0].p == std::complex<double>(2.0, 0));
  CHECK(d.factors[0].klass == FactorClass::CriticalPlus);

  d = decompose(Filter({3, 6.9, 3}));
  CHECK(d.gain == 3);
  REQUIRE(d.factors.size() == 1);
  CHECK(d.factors[0].p.real() == doctest::Approx(2.3).epsilon(1e-15));

  d = decompose(Filter::unitary());
  CHECK(d.factors.empty());
  CHECK(d.gain == 1);
}

TEST_CASE("decompose ordering is deterministic") {
  // Oscillatory 1 and 0.5, critical -2, invertible 3 and -4.
  const auto d = decompose(Filter(oracle::filter_from_params({0.5, -2, 1, -4, 3})));
  REQUIRE(d.factors.size() == 5);
  const std::vector<double> expect{3, -4, -2, 1, 0.5};
  for (std::size_t i = 0; i < 5; ++i) CHECK(d.factors[i].p.real() == doctest::Approx(expect[i]).epsilon(1e-9));
  CHECK(d.factors[2].klass == FactorClass::CriticalMinus);
}

TEST_CASE("complex factor pairs") {
  // Root quadruple off the unit circle: [1,p,1]*[1,conj p,1] with p = 1 + 2i.
  const std::complex<double> p(1, 2);
  const auto prod = oracle::product_of_quadratics({p, std::conj(p)});
  std::vector<double> c;
  for (auto v : prod) c.push_back(v.real());
  const auto d = decompose(Filter(c));
  REQUIRE(d.factors.size() == 2);
  CHECK(d.factors[0].p.imag() > 0);
  CHECK(std::abs(d.factors[0].p - p) < 1e-12);
  CHECK(*d.factors[0].conjugatePartner == 1);
  CHECK(*d.factors[1].conjugatePartner == 0);
  CHECK(d.factors[0].klass == FactorClass::Invertible);

  const Filter back = reconvolve(d);
  CHECK(oracle::max_abs_diff(back.coefficients(), c) <= 1e-10);

  Decomposition unpaired{1.0, {ElementaryFactor{p, std::nullopt, FactorClass::Invertible}}, 0.0};
  CHECK_THROWS_AS(reconvolve(unpaired), Error);
}

TEST_CASE("reconvolve examples") {
  auto mk = [](double gain, std::vector<double> ps) {
    Decomposition d;
    d.gain = gain;
    for (double p : ps) d.factors.push_back({p, std::nullopt, classify(p)});
    return d;
  };
  CHECK(reconvolve(mk(1, {2.3})).coefficients() == std::vector<double>{1, 2.3, 1});
  CHECK(oracle::max_abs_diff(reconvolve(mk(1, {2.0, 2.3})).coefficients(), {1, 4.3, 6.6, 4.3, 1}) < 1e-15);
  CHECK(reconvolve(mk(2, {2.0})).coefficients() == std::vector<double>{2, 4, 2});
}

TEST_CASE("round trip on random factor sets") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto ps = oracle::random_vector(rng, n, -5, 5);
    const double gain = oracle::random_vector(rng, 1, 0.5, 3)[0];
    const auto c = oracle::filter_from_params(ps, gain);
    const auto d = decompose(Filter(c));
    CHECK(d.gain == doctest::Approx(gain));
    CHECK(multiset_distance(params(d), {ps.begin(), ps.end()}) <= 1e-7);
    const auto back = reconvolve(d).coefficients();
    double cmax = 0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    CHECK(oracle::max_abs_diff(back, c) <= 1e-9 * cmax);
  }
}

TEST_CASE("roots of the characteristic polynomial pair as u and 1/u") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto ps = oracle::random_vector(rng, n, -5, 5);
    const auto d = decompose(Filter(oracle::filter_from_params(ps)));
    // Each p gives u + 1/u = -p; both u and 1/u must be roots of P.
    std::vector<std::complex<double>> pc;
    for (double v : char_polynomial(Filter(oracle::filter_from_params(ps))).coeffs) pc.push_back(v);
    auto eval = [&](std::complex<double> x) {
      std::complex<double> acc = 0;
      for (auto it = pc.rbegin(); it != pc.rend(); ++it) acc = acc * x + *it;
      return acc;
    };
    for (const auto& f : d.factors) {
      const auto [u1, u2] = oracle::quadratic_roots(f.p);
      CHECK(std::abs(u1 * u2 - 1.0) < 1e-8);
      const double scale = 1 + std::pow(std::abs(u2), static_cast<double>(2 * n));
      CHECK(std::abs(eval(u1)) <= 1e-8 * scale);
      CHECK(std::abs(eval(u2)) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("tightly clustered parameters still reconvolve to the filter") {
  // Four parameters within 0.6 of each other; roots taken from Q alone carry
  // a coefficient error near 2e-8 here.
  const std::vector<double> ps{4.2643383595784385, -1.0465537721794851, 4.7654023450647447, -0.12935439603120447,
                               4.6847338123800348, 4.7034730690404807, 4.8598257682919801, 2.8031137366646934};
  const auto c = oracle::filter_from_params(ps);
  const auto d = decompose(Filter(c));
  CHECK(d.residual <= 1e-12);
  CHECK(multiset_distance(params(d), {ps.begin(), ps.end()}) <= 1e-7);
}

TEST_CASE("double critical factor stays exact") {
  const auto d = decompose(Filter({1, 4, 6, 4, 1}));
  REQUIRE(d.factors.size() == 2);
  CHECK(d.factors[0].p == std::complex<double>(2, 0));
  CHECK(d.factors[1].p == std::complex<double>(2, 0));
  CHECK(d.residual == 0.0);
}
