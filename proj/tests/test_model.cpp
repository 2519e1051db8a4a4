#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <numbers>
#include <vector>

#include "aea/error.hpp"
#include "aea/model.hpp"
#include "aea/rng.hpp"
#include "oracles.hpp"

using namespace aea;

namespace {

// Triangle on [0, 2] with mode 0.5 (mean 5/6) plus a 0.05 floor; total
// mass 1.1, mean (5/6 + 0.1) / 1.1.
NoiseSpec skewed_triangle() {
  std::vector<double> x, d;
  for (int i = 0; i <= 200; ++i) {
    const double e = 0.01 * i;
    x.push_back(e);
    d.push_back(0.05 + (e <= 0.5 ? e / 0.5 : (2.0 - e) / 1.5));
  }
  return NoiseSpec::tabulated(x, d);
}

}  // namespace

TEST_CASE("one step of the built-in chains") {
  CHECK(step(make_stable_ar(0.5), 2.0, 0.0) == 1.0);
  const auto cir = make_clamped_cir(0.5, 1.0, 0.5, 2.0);
  CHECK(step(cir, 9.0, 1.0) == doctest::Approx(6.5).epsilon(1e-15));
  CHECK(step(cir, 0.04, 1.0) == doctest::Approx(0.52).epsilon(1e-15));
}

TEST_CASE("stable AR step is a x + e") {
  const auto m = make_stable_ar(0.5);
  auto s = stream_for_path(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = 20.0 * (s.next() - 0.5);
    const double e = normal_quantile(s.next());
    CHECK(step(m, x, e) == 0.5 * x + e);
    CHECK(step(m, x, e) == step(m, x, e));
  }
  const auto m7 = make_stable_ar(-0.7);
  CHECK(step(m7, 3.0, 0.25) == doctest::Approx(-0.7 * 3.0 + 0.25).epsilon(1e-15));
}

TEST_CASE("step signals blow-up with the offending state") {
  const auto m = make_stable_ar(0.5);
  try {
    step(m, DBL_MAX, DBL_MAX);
    FAIL("expected ModelBlowUp");
  } catch (const ModelBlowUp& e) {
    CHECK(e.state() == DBL_MAX);
  }
}

TEST_CASE("price map") {
  CHECK(price(0.0).value == 1.0);
  CHECK(price(1.0).value == doctest::Approx(std::numbers::e));
  const auto p = price(-701.0);
  CHECK(p.underflow);
  CHECK(p.value == 0.0);
  CHECK_FALSE(price(-10.0).underflow);
  CHECK_THROWS_AS(price(710.0), ModelBlowUp);
}

TEST_CASE("transition density") {
  const auto ar = make_stable_ar(0.5);
  CHECK(transition_density(ar, 0.0, 0.0) == doctest::Approx(0.39894228).epsilon(1e-8));

  const auto cir = make_clamped_cir(0.5, 1.0, 0.5, 2.0);
  for (double x : {-9.0, 0.04, 1.0, 9.0}) {
    const double y = x + cir.drift(x);
    CHECK(transition_density(cir, x, y) ==
          doctest::Approx(oracle::normal_pdf(0.0) / cir.vol(x)).epsilon(1e-14));
  }

  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(-3.0 + 0.1 * i);
  CHECK(min_transition_density(ar, grid) > 0.0);
  CHECK(min_transition_density(cir, grid) > 0.0);

  for (double x : {-4.0, 0.0, 2.5}) {
    const double c = x + cir.drift(x), w = 12.0 * cir.vol(x);
    const double mass =
        oracle::simpson([&](double y) { return transition_density(cir, x, y); }, c - w, c + w, 4000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("noise is centred at construction and the shift is recorded") {
  const auto dw = make_drifted_walk(0.25);
  CHECK(dw.centering_shift() == 0.25);
  CHECK(dw.drift(-3.0) == 0.25);
  CHECK(dw.drift(100.0) == 0.25);
  CHECK(dw.noise().mean() == 0.0);

  const auto raw = skewed_triangle();
  const double mean = (2.5 / 3.0 + 0.1) / 1.1;
  CHECK(raw.mean() == doctest::Approx(mean).epsilon(1e-10));
  const auto m = make_stable_ar(0.5, 0.0, raw);
  CHECK(m.centering_shift() == doctest::Approx(mean).epsilon(1e-10));
  CHECK(std::abs(m.noise().mean()) < 1e-12);

  // Empirical mean of 10^6 draws from the centred law.
  const double sd = std::sqrt(m.noise().variance());
  auto s = stream_for_path(11, 0);
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += m.noise().sample(s.next());
  CHECK(std::abs(acc / n) < 4.0 * sd / 1000.0);
}

TEST_CASE("tabulated noise outside its grid") {
  const auto m = make_stable_ar(0.5, 0.0, skewed_triangle());
  CHECK_THROWS_AS(transition_density(m, 0.0, 10.0), OutOfSupport);
  CHECK(m.noise().log_density(5.0) == -INFINITY);
  CHECK(m.noise().density(0.0) > 0.0);
}

TEST_CASE("gaussian noise defaults") {
  const auto n = NoiseSpec::gaussian(0.0, 2.0);
  CHECK(n.kappa() == doctest::Approx(0.25 / 4.0));
  CHECK(n.variance() == doctest::Approx(4.0));
  CHECK(n.sample(0.5) == 0.0);
  CHECK(n.sample(oracle::normal_cdf(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(make_stable_ar(1.0), InvalidArgument);
  CHECK_THROWS_AS(make_stable_ar(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_stable_ar(-1.5), InvalidArgument);
  CHECK_THROWS_AS(make_clamped_cir(0.5, 0.0, 0.5, 2.0), InvalidArgument);
  CHECK_THROWS_AS(make_clamped_cir(0.5, 1.0, 2.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(NoiseSpec::gaussian(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(NoiseSpec::gaussian(0.0, 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(MarketModel("bad", AffineMap{0.0, 0.0}, AffineMap{0.0, -1.0},
                              NoiseSpec::gaussian(0.0, 1.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(MarketModel("bad", AffineMap{0.0, 0.0}, TableMap{{0.0, 1.0}, {1.0, 0.0}},
                              NoiseSpec::gaussian(0.0, 1.0)),
                  InvalidArgument);
}

TEST_CASE("table maps interpolate and extrapolate") {
  const ScalarMap flat = TableMap{{0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}};
  CHECK(evaluate(flat, 0.5) == 1.0);
  CHECK(evaluate(flat, -5.0) == 0.0);
  CHECK(evaluate(flat, 9.0) == 1.0);
  CHECK(supremum(flat) == 2.0);
  const ScalarMap lin =
      TableMap{{0.0, 1.0}, {0.0, 2.0}, Extrapolation::Linear, Extrapolation::Linear};
  CHECK(evaluate(lin, 3.0) == 6.0);
  CHECK(evaluate(lin, -1.0) == -2.0);
  CHECK(supremum(lin) == INFINITY);
  CHECK(supremum(ScalarMap{ClampedSqrtMap{1.5, 0.5, 2.0}}) == 3.0);
}
