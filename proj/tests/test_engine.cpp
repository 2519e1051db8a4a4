#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aea/engine.hpp"
#include "aea/error.hpp"
#include "oracles.hpp"

using namespace aea;

namespace {

double mean_growth(const PathEnsemble& e) {
  const auto s = e.valid_sums(e.n_checkpoints() - 1);
  const double t = static_cast<double>(e.time(e.n_checkpoints() - 1));
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size()) / t;
}

}  // namespace

TEST_CASE("plan validation") {
  const auto ar = make_stable_ar(0.5);
  const auto pp = Strategy::positive_drift();
  CHECK_NOTHROW(SimulationPlan{ar, pp, 10, 5, 1, {5, 10}, false}.validate());
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 10, 5, 1, {}, false}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 10, 5, 1, {5, 5}, false}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 10, 5, 1, {7, 3}, false}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 10, 5, 1, {11}, false}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 10, 5, 1, {0, 4}, false}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 10, 0, 1, {10}, false}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SimulationPlan({ar, pp, 0, 5, 1, {1}, false}).validate(), InvalidArgument);
}

TEST_CASE("bank account keeps every sum at zero") {
  const SimulationPlan plan{make_stable_ar(0.5), Strategy::constant(0.0), 50, 200, 3, {1, 25, 50}, false};
  const auto e = simulate(plan);
  for (double s : e.sums) CHECK(s == 0.0);
}

TEST_CASE("drifted walk growth rate") {
  const SimulationPlan plan{make_drifted_walk(0.25), Strategy::full_invest(), 400, 100000, 21, {400}, false};
  const double g = mean_growth(simulate(plan));
  CHECK(std::abs(g - 0.25) < 0.002);
}

TEST_CASE("stable AR growth rate under the positive-drift rule") {
  const SimulationPlan plan{make_stable_ar(0.5), Strategy::positive_drift(), 10000, 1000, 22, {10000}, false};
  const double g = mean_growth(simulate(plan));
  CHECK(std::abs(g - oracle::ar_positive_drift_growth(0.5)) < 0.01);
}

TEST_CASE("simulation is deterministic and independent of the worker count") {
  const SimulationPlan plan{make_clamped_cir(0.5, 1.0, 0.5, 2.0), Strategy::positive_drift(),
                            64, 1001, 5, {8, 32, 64}, true};
  const auto a = simulate(plan, Execution{1});
  const auto b = simulate(plan, Execution{1});
  const auto c = simulate(plan, Execution{7});
  CHECK(a.sums == b.sums);
  CHECK(a.sums == c.sums);
  CHECK(a.states == c.states);
  CHECK(a.states.size() == 3 * 1001);
}

TEST_CASE("checkpoints are partial sums of the serial increments") {
  const SimulationPlan plan{make_stable_ar(0.5), Strategy::constant(0.4), 30, 12, 8, {5, 17, 30}, false};
  const auto e = simulate(plan, Execution{3});
  for (std::size_t m = 0; m < plan.paths; ++m) {
    const auto inc = path_increments(plan, m);
    REQUIRE(inc.size() == 30);
    double acc = 0.0;
    std::size_t c = 0;
    for (std::size_t t = 1; t <= 30; ++t) {
      acc += inc[t - 1];
      if (t == plan.checkpoints[c]) {
        CHECK(e.value(c, m) == doctest::Approx(acc).epsilon(1e-13));
        ++c;
      }
    }
  }
}

TEST_CASE("paths that blow up are excluded and reported") {
  const MarketModel wild("wild", AffineMap{1e200, 0.0}, AffineMap{0.0, 1.0},
                         NoiseSpec::gaussian(0.0, 1.0), 1.0);
  const SimulationPlan plan{wild, Strategy::full_invest(), 10, 4, 1, {10}, false};
  const auto e = simulate(plan);
  CHECK(e.excluded.size() == 4);
  CHECK(e.valid_sums(0).empty());
  for (const auto& x : e.excluded) {
    CHECK(std::isfinite(x.last_state));
    CHECK(x.step >= 1);
    CHECK(std::isnan(e.value(0, x.path_index)));
  }
}

TEST_CASE("even checkpoints") {
  CHECK(even_checkpoints(100, 4) == std::vector<std::size_t>{25, 50, 75, 100});
  CHECK(even_checkpoints(3, 10) == std::vector<std::size_t>{1, 2, 3});
  const auto e = simulate({make_stable_ar(0.5), Strategy::full_invest(), 10, 2, 0, {4, 10}, false});
  CHECK(e.checkpoint_index(10) == 1);
  CHECK_FALSE(e.checkpoint_index(5).has_value());
  CHECK(e.stream_id(1) == 1);
}
