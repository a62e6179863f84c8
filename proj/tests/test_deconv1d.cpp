#include <doctest.h>

#include "finvert/deconv1d.hpp"
#include "finvert/error.hpp"
#include "oracles.hpp"

using namespace finvert;

namespace {

Sequence blur(const Sequence& x, const Filter& f) { return convolve(x, f.as_sequence()).window(x.first(), x.last()); }

Decomposition real_decomposition(double gain, std::vector<double> ps) {
  Decomposition d;
  d.gain = gain;
  for (double p : ps) d.factors.push_back({p, std::nullopt, classify(p)});
  return d;
}

// RMS of the restoration against factor-space truth on the exact interior.
double interior_rms(const DeconvResult& r, const Sequence& x) {
  const Sequence truth = r.factor_space(x);
  return rms(r.signal.window(r.interiorFirst, r.interiorLast), truth.window(r.interiorFirst, r.interiorLast));
}

}  // namespace

TEST_CASE("build_inverse examples") {
  const auto single = build_inverse(real_decomposition(1, {2.3}));
  const auto ref = invert_elementary(2.3);
  CHECK(single.z.values() == ref.z.values());
  CHECK(single.z.origin() == ref.z.origin());

  const auto pair = build_inverse(real_decomposition(1, {2.3, 5}));
  const Sequence c = Filter(oracle::filter_from_params({2.3, 5})).as_sequence();
  const Sequence cz = convolve(c, pair.z);
  const long reach = pair.z.last() - 2;
  double worst = 0;
  for (long t = -reach; t <= reach; ++t) worst = std::max(worst, std::abs(cz.at(t) - (t == 0 ? 1 : 0)));
  CHECK(worst <= 2 * 3 * 1e-12);

  const auto scaled = build_inverse(real_decomposition(4, {2.3}));
  CHECK(scaled.z.at(0) == doctest::Approx(ref.z.at(0) / 4).epsilon(1e-15));

  try {
    build_inverse(real_decomposition(1, {2.3, 1}));
    FAIL("expected NotInvertible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInvertible);
    CHECK(std::string(e.what()).find("p = {1}") != std::string::npos);
  }
}

TEST_CASE("identity filter passes the signal through") {
  std::mt19937_64 rng(1);
  const Sequence y(oracle::random_vector(rng, 40), 3);
  const auto r = deconvolve(y, Filter::unitary());
  CHECK(r.signal.values() == y.values());
  CHECK(r.signal.first() == y.first());
  CHECK(r.report.lengthLoss == 0);
  CHECK(r.report.invertibleCount == 0);
  CHECK(r.report.noninvertibleCount == 0);
  CHECK(r.report.nyquistBefore == r.report.nyquistAfter);
  CHECK_FALSE(r.report.partiallyRestored);
}

TEST_CASE("invertible filter [1,2.3,1] restores the interior exactly") {
  std::mt19937_64 rng(2);
  const Filter f({1, 2.3, 1});
  for (auto policy : {BoundaryPolicy::Reflect, BoundaryPolicy::Zero, BoundaryPolicy::Periodic}) {
    const Sequence x(oracle::random_vector(rng, 256));
    DeconvOptions o;
    o.boundary = policy;
    const auto r = deconvolve(blur(x, f), f, o, x);
    REQUIRE(r.report.interiorRms.has_value());
    CHECK(r.report.interiorRms.value() <= 1e-8);
    CHECK(r.report.lengthLoss == 0);
    CHECK(r.interiorFirst == x.first() + static_cast<long>(r.report.inverseHalfSupport + 1));
    CHECK(interior_rms(r, x) == doctest::Approx(r.report.interiorRms.value()));
  }
}

TEST_CASE("random invertible filters round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(2.05, 6), sign(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> ps;
    const std::size_t n = 1 + trial % 5;
    for (std::size_t k = 0; k < n; ++k) ps.push_back(sign(rng) < 0 ? -mag(rng) : mag(rng));
    const Filter f(oracle::filter_from_params(ps, 0.7));
    const Sequence x(oracle::random_vector(rng, 512));
    const auto r = deconvolve(blur(x, f), f, {}, x);
    CAPTURE(trial);
    CHECK(r.report.interiorRms.value() <= 1e-8);
    CHECK(r.report.invertibleCount == n);
    // Interior excludes inverse support + filter order at each end.
    const long margin = static_cast<long>(r.report.inverseHalfSupport + f.order());
    CHECK(r.interiorFirst == margin);
    CHECK(r.interiorLast == 511 - margin);
  }
}

TEST_CASE("oscillatory filter [1,1,1] restores modulo its kernel on a shorter domain") {
  std::mt19937_64 rng(4);
  const Filter f({1, 1, 1});
  const Sequence x(oracle::random_vector(rng, 256));
  const Sequence y = blur(x, f);
  const auto r = deconvolve(y, f, {}, x);
  CHECK(r.report.lengthLoss == 2);
  CHECK(r.report.noninvertibleCount == 1);
  CHECK(r.signal.size() == y.size() - 2);
  CHECK(r.signal.first() == y.first() + 1);
  CHECK(r.report.interiorRms.value() <= 1e-8);
  CHECK_FALSE(r.report.partiallyRestored);

  // Cross-check the factor-space truth with a least-squares oracle on the
  // projection window.
  const auto kb = kernel_basis(1.0, static_cast<std::size_t>(r.projectionLast - r.projectionFirst + 1));
  const auto xw = x.window(r.projectionFirst, r.projectionLast).values();
  const auto resid = oracle::least_squares_residual(xw, kb.k1.values(), kb.k2.values());
  const Sequence oracle_truth(resid, -r.projectionFirst);
  const Sequence mine = r.factor_space(x);
  for (long t = r.interiorFirst; t <= r.interiorLast; ++t) CHECK(std::abs(mine.at(t) - oracle_truth.at(t)) <= 1e-10);
  for (long t = r.interiorFirst; t <= r.interiorLast; ++t) CHECK(std::abs(r.signal.at(t) - oracle_truth.at(t)) <= 1e-8);
}

TEST_CASE("single oscillatory factor round trip for random p") {
  std::mt19937_64 rng(5);
  for (double p : oracle::random_vector(rng, 15, -1.9, 1.9)) {
    CAPTURE(p);
    const Filter f({1, p, 1});
    const Sequence x(oracle::random_vector(rng, 200));
    const auto r = deconvolve(blur(x, f), f, {}, x);
    CHECK(r.report.interiorRms.value() <= 1e-8);
  }
}

TEST_CASE("mixed and repeated non-invertible factors") {
  std::mt19937_64 rng(6);
  const std::vector<std::vector<double>> sets{{2.3, 1}, {3, -1, 0.5}, {1, 1}, {2.5, -0.3, 1.2}, {-4, 0.7, 0.7}};
  for (const auto& ps : sets) {
    const Filter f(oracle::filter_from_params(ps, 2.0));
    const Sequence x(oracle::random_vector(rng, 300));
    const auto r = deconvolve(blur(x, f), f, {}, x);
    CAPTURE(ps.size());
    CHECK(r.report.interiorRms.value() <= 1e-8);
    std::size_t m = 0;
    for (double p : ps) m += classify(p) == FactorClass::Invertible ? 0 : 1;
    CHECK(r.report.noninvertibleCount == m);
    CHECK(r.report.lengthLoss == 2 * m);
  }
}

TEST_CASE("critical factors are left un-inverted and flagged") {
  std::mt19937_64 rng(7);
  for (const auto& ps : std::vector<std::vector<double>>{{2}, {-2}, {2.3, -2}, {2, 1}}) {
    const Filter f(oracle::filter_from_params(ps));
    const Sequence x(oracle::random_vector(rng, 200));
    const auto r = deconvolve(blur(x, f), f, {}, x);
    CHECK(r.report.partiallyRestored);
    CHECK(r.report.lengthLoss == 2 * (ps.size() - (ps[0] == 2.3 ? 1 : 0)));
    CHECK(r.report.interiorRms.value() <= 1e-8);
  }
}

TEST_CASE("deconvolve rejects short signals") {
  const Filter f({1, 4.3, 6.6, 4.3, 1});
  CHECK_THROWS_AS(deconvolve(Sequence({1, 2, 3, 4, 5}), f), Error);
}

TEST_CASE("project_out_kernel") {
  const auto kb = kernel_basis(1.0, 30);
  const Sequence zero = project_out_kernel(kb.k1, kb);
  for (double v : zero.values()) CHECK(std::abs(v) <= 1e-12);

  std::mt19937_64 rng(8);
  const auto xs = oracle::random_vector(rng, 30);
  const auto r = oracle::least_squares_residual(xs, kb.k1.values(), kb.k2.values());
  // Orthogonal input is unchanged.
  const Sequence same = project_out_kernel(Sequence(r), kb);
  CHECK(oracle::max_abs_diff(same.values(), r) <= 1e-12);
  // k1 + r recovers r.
  std::vector<double> mixed(30);
  for (std::size_t i = 0; i < 30; ++i) mixed[i] = kb.k1.values()[i] + r[i];
  CHECK(oracle::max_abs_diff(project_out_kernel(Sequence(mixed), kb).values(), r) <= 1e-12);

  for (double p : {2.0, -2.0, 0.5, -1.0}) {
    const auto b = kernel_basis(p, 50);
    const Sequence x(oracle::random_vector(rng, 50));
    const Sequence once = project_out_kernel(x, b);
    const Sequence twice = project_out_kernel(once, b);
    CHECK(oracle::max_abs_diff(once.values(), twice.values()) <= 1e-12);
    double norm = 0, d1 = 0, d2 = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      norm += x.values()[i] * x.values()[i];
      d1 += once.values()[i] * b.k1.values()[i];
      d2 += once.values()[i] * b.k2.values()[i];
    }
    CHECK(std::abs(d1) <= 1e-9 * std::sqrt(norm));
    CHECK(std::abs(d2) <= 1e-9 * std::sqrt(norm));
  }
  CHECK_THROWS_AS(project_out_kernel(Sequence({1, 2, 3}), kb), Error);
}

TEST_CASE("kernel projector detects degenerate bases") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8};
  try {
    KernelProjector proj({a, b});
    FAIL("expected DegenerateBasis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateBasis);
  }
}

TEST_CASE("resolution_report") {
  const auto none = resolution_report(real_decomposition(1, {2.3}), 101);
  CHECK(none.nyquistBefore == Rational{1, 100});
  CHECK(none.nyquistAfter == none.nyquistBefore);
  CHECK(none.lengthLoss == 0);

  const auto one = resolution_report(real_decomposition(1, {1.0}), 101);
  CHECK(one.nyquistBefore == Rational{1, 100});
  CHECK(one.nyquistAfter == Rational{1, 98});
  CHECK(one.lengthLoss == 2);

  const auto two = resolution_report(real_decomposition(1, {2.0, -0.5, 3}), 51);
  CHECK(two.lengthLoss == 4);
  CHECK(two.noninvertibleCount == 2);
  CHECK(two.invertibleCount == 1);
  CHECK(two.nyquistAfter == Rational{1, 46});

  const auto degenerate = resolution_report(real_decomposition(1, {1, 1, 1}), 5);
  CHECK(degenerate.degenerate);
  CHECK_FALSE(degenerate.nyquistAfter.defined());
}
