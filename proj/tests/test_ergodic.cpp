#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aea/engine.hpp"
#include "aea/ergodic.hpp"
#include "aea/error.hpp"
#include "oracles.hpp"

using namespace aea;

namespace {

ErgodicReport run(const MarketModel& m, const Strategy& s, std::size_t length, std::uint64_t seed) {
  ErgodicOptions o;
  o.length = length;
  o.seed = seed;
  return run_ergodic(m, s, o);
}

}  // namespace

TEST_CASE("default burn-in") {
  CHECK(default_burn_in(10'000) == 1000);
  CHECK(default_burn_in(10'000'000) == 100'000);
}

TEST_CASE("stable AR growth rate matches the stationary Gaussian oracle") {
  const auto r = run(make_stable_ar(0.5), Strategy::positive_drift(), 2'000'000, 1);
  CHECK(std::abs(r.nu_f_hat - oracle::ar_positive_drift_growth(0.5)) < 0.005);
  CHECK(r.nu_f_hat > 4.0 * r.nu_f_stderr);
  REQUIRE(r.sigma2_f_hat.has_value());
  CHECK(*r.sigma2_f_hat > 0.0);
  CHECK(r.n_batches >= 20);
  CHECK_FALSE(r.constant_f_flag);
}

TEST_CASE("bank account: zero growth, zero variance, constant flag") {
  const auto r = run(make_stable_ar(0.5), Strategy::constant(0.0), 200'000, 2);
  CHECK(r.nu_f_hat == 0.0);
  CHECK(r.constant_f_flag);
  REQUIRE(r.sigma2_f_hat.has_value());
  CHECK(*r.sigma2_f_hat == 0.0);
}

TEST_CASE("drifted walk: i.i.d. mean and variance") {
  const auto r = run(make_drifted_walk(0.25), Strategy::full_invest(), 1'000'000, 3);
  CHECK(std::abs(r.nu_f_hat - 0.25) < 0.003);
  REQUIRE(r.sigma2_f_hat.has_value());
  CHECK(std::abs(*r.sigma2_f_hat - 1.0) < 0.1);
}

TEST_CASE("asymptotic variance is seed-stable; mean agrees across seeds") {
  const auto a = run(make_stable_ar(0.5), Strategy::positive_drift(), 2'000'000, 10);
  const auto b = run(make_stable_ar(0.5), Strategy::positive_drift(), 2'000'000, 11);
  CHECK(std::abs(*a.sigma2_f_hat / *b.sigma2_f_hat - 1.0) < 0.15);
  CHECK(std::abs(a.nu_f_hat - b.nu_f_hat) < 4.0 * (a.nu_f_stderr + b.nu_f_stderr));
}

TEST_CASE("standalone estimators") {
  const auto ar = make_stable_ar(0.5);
  const auto est = estimate_nu_f(ar, Strategy::positive_drift(), 500'000, 5000, 4);
  CHECK(std::abs(est.value - oracle::ar_positive_drift_growth(0.5)) < 5.0 * est.std_error + 1e-3);
  CHECK(estimate_sigma2_f(ar, Strategy::positive_drift(), 500'000, 5000, 1000, 4) > 0.0);
  // 9 batches of 1000 after burn-in: refused.
  CHECK_THROWS_AS(estimate_sigma2_f(ar, Strategy::positive_drift(), 10'000, 1000, 1000, 4),
                  InvalidArgument);
  CHECK_THROWS_AS(estimate_sigma2_f(ar, Strategy::positive_drift(), 1'000'000, 1000, 50, 4),
                  InvalidArgument);
}

TEST_CASE("a transient chain trips the non-ergodicity guard") {
  CHECK_THROWS_AS(run(make_drifted_walk(1.0), Strategy::full_invest(), 3'000'000, 5), NonErgodic);
}

TEST_CASE("ensemble average and time average agree") {
  const auto ar = make_stable_ar(0.5);
  const auto pp = Strategy::positive_drift();
  const auto r = run(ar, pp, 2'000'000, 6);
  const auto e = simulate({ar, pp, 10000, 1000, 7, {10000}, false});
  const auto s = e.valid_sums(0);
  double mean = 0.0, sq = 0.0;
  for (double v : s) mean += v / 1e4;
  mean /= static_cast<double>(s.size());
  for (double v : s) sq += (v / 1e4 - mean) * (v / 1e4 - mean);
  const double se = std::sqrt(sq / (s.size() - 1.0) / s.size());
  CHECK(std::abs(mean - r.nu_f_hat) < 4.0 * std::hypot(se, r.nu_f_stderr));
}

TEST_CASE("invariant histogram of the stable AR chain") {
  const double s = oracle::ar_stationary_sd(0.5);
  const auto edges = uniform_edges(-4.0 * s, 4.0 * s, 40);
  const std::size_t length = 1'000'000;
  const auto h = empirical_invariant_histogram(make_stable_ar(0.5), length, 10'000, edges, edges, 8);

  CHECK(std::accumulate(h.mass.begin(), h.mass.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  // Kolmogorov-Smirnov distance of the X marginal at the bin edges.
  const auto marg = h.x_marginal();
  const double lo_mass = oracle::normal_cdf(edges.front() / s);
  const double in_mass = oracle::normal_cdf(edges.back() / s) - lo_mass;
  double cdf = 0.0, ks = 0.0;
  for (std::size_t i = 0; i < marg.size(); ++i) {
    cdf += marg[i];
    const double exact = (oracle::normal_cdf(edges[i + 1] / s) - lo_mass) / in_mass;
    ks = std::max(ks, std::abs(cdf - exact));
  }
  CHECK(ks < 0.01);
  CHECK(h.outside_fraction < 1e-3);

  // Cells whose exact stationary mass is well above 1/length must be hit.
  // Joint law: X ~ N(0, s^2), Y | X ~ N(X/2, 1); 2-D midpoint estimate of cell mass.
  std::size_t checked = 0;
  for (std::size_t i = 0; i < h.nx(); ++i) {
    for (std::size_t j = 0; j < h.ny(); ++j) {
      const double xm = 0.5 * (edges[i] + edges[i + 1]);
      const double ym = 0.5 * (edges[j] + edges[j + 1]);
      const double w = edges[1] - edges[0];
      const double exact = oracle::normal_pdf(xm / s) / s * oracle::normal_pdf(ym - 0.5 * xm) * w * w;
      if (std::abs(xm) <= 3.0 * s && std::abs(ym) <= 3.0 * s && exact > 20.0 / length) {
        CHECK(h.at(i, j) > 0.0);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}
