#include "aea/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aea/error.hpp"

namespace aea {

namespace {

void check_fraction(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("strategy: allocation fractions must lie in [0, 1]");
  }
}

}  // namespace

Strategy::Strategy(Kind kind) : kind_(std::move(kind)) {
  if (const auto* c = std::get_if<ConstantFraction>(&kind_)) check_fraction(c->fraction);
  if (const auto* t = std::get_if<TableAllocation>(&kind_)) {
    if (t->fractions.size() != t->breaks.size() + 1) {
      throw InvalidArgument("strategy table: need one more fraction than breaks");
    }
    for (double p : t->fractions) check_fraction(p);
    for (std::size_t i = 1; i < t->breaks.size(); ++i) {
      if (!(t->breaks[i] > t->breaks[i - 1])) {
        throw InvalidArgument("strategy table: breaks must be strictly increasing");
      }
    }
  }
}

double allocate(const Strategy& strategy, const MarketModel& model, double x) {
  const auto& k = strategy.kind();
  switch (k.index()) {
    case 0:
      return model.drift(x) > 0.0 ? 1.0 : 0.0;
    case 1:
      return std::get<ConstantFraction>(k).fraction;
    case 2:
      return 1.0;
    default: {
      const auto& t = std::get<TableAllocation>(k);
      const auto it = std::upper_bound(t.breaks.begin(), t.breaks.end(), x);
      return t.fractions[static_cast<std::size_t>(it - t.breaks.begin())];
    }
  }
}

double log_increment(double pi_x, double x, double y) {
  if (pi_x == 0.0) return 0.0;
  const double d = y - x;
  if (pi_x == 1.0) return d;
  if (d <= 0.0) return std::log1p(pi_x * std::expm1(d));
  return d + std::log1p((1.0 - pi_x) * std::expm1(-d));
}

WealthState WealthState::initial(double v0) {
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw InvalidArgument("wealth: V0 must be > 0");
  return WealthState{v0, 0.0, v0, true};
}

WealthState wealth_step(const WealthState& state, double pi_x, double x, double y) {
  WealthState next = state;
  next.log_sum = state.log_sum + log_increment(pi_x, x, y);
  if (state.linear_valid) {
    const double factor = (1.0 - pi_x) + pi_x * std::exp(y - x);
    const double v = state.v * factor;
    if (std::isfinite(v) && v > 0.0) {
      next.v = v;
      return next;
    }
  }
  // Outside the linear range: keep v as the clamped image of log_sum.
  next.linear_valid = false;
  const double lv = std::log(state.v0) + next.log_sum;
  next.v = std::clamp(std::exp(lv), std::numeric_limits<double>::min(),
                      std::numeric_limits<double>::max());
  return next;
}

}  // namespace aea
