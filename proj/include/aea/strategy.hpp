#pragma once

#include <variant>
#include <vector>

#include "aea/model.hpp"

namespace aea {

/// pi+(x) = 1 if mu(x) > 0 else 0, resolved against the model drift.
struct PositiveDriftIndicator {};

struct ConstantFraction {
  double fraction = 0.0;
};

/// pi == 1.
struct FullInvest {};

/// Piecewise-constant allocation: fractions[i] on [breaks[i-1], breaks[i]),
/// with breaks.size() + 1 == fractions.size().
struct TableAllocation {
  std::vector<double> breaks;
  std::vector<double> fractions;
};

/// Stationary Markovian allocation map pi: R -> [0, 1].
class Strategy {
 public:
  using Kind = std::variant<PositiveDriftIndicator, ConstantFraction, FullInvest,
                            TableAllocation>;

  Strategy(Kind kind);  // NOLINT: implicit by design of the variant wrapper

  static Strategy positive_drift() { return Strategy(PositiveDriftIndicator{}); }
  static Strategy constant(double fraction) { return Strategy(ConstantFraction{fraction}); }
  static Strategy full_invest() { return Strategy(FullInvest{}); }

  const Kind& kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Fraction of wealth held in the stock when the last log-price is x.
double allocate(const Strategy& strategy, const MarketModel& model, double x);

/// f(x, y) = log((1 - pi) + pi exp(y - x)).
///
/// Evaluated without cancellation: exact for pi in {0, 1}, log1p/expm1
/// otherwise, with the exp(y - x) factor pulled out when y > x.
double log_increment(double pi_x, double x, double y);

/// Wealth in both representations.  `log_sum` is primary; `v` is derived
/// and stops being tracked (linear_valid = false) once it overflows.
struct WealthState {
  double v = 1.0;
  double log_sum = 0.0;
  double v0 = 1.0;
  bool linear_valid = true;

  static WealthState initial(double v0);
};

/// V' = V ((1 - pi) + pi exp(y - x)), log_sum' = log_sum + f(x, y).
WealthState wealth_step(const WealthState& state, double pi_x, double x, double y);

}  // namespace aea
