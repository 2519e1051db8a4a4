#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aea/arbitrage.hpp"
#include "aea/engine.hpp"
#include "aea/error.hpp"
#include "aea/ldp.hpp"

namespace aea {

/// Power utility U(x) = x^alpha for 0 < alpha < 1 and U(x) = -x^alpha for alpha < 0.
struct UtilitySpec {
  double alpha = 0.5;

  void validate() const;
  double operator()(double x) const;
};

enum class Regime { DecaysToZero, Diverges, Indeterminate };

std::string to_string(Regime r);

struct UtilityOptions {
  std::vector<std::size_t> t_grid{1, 2, 3, 4, 5, 6};
  std::size_t paths = 100'000;
  std::uint64_t seed = 0;
  double v0 = 1.0;
  double ess_min = kDefaultEssMin;
  std::optional<double> alpha0_ref;
  Execution exec{};
};

struct UtilityReport {
  double alpha = 0.0;
  double v0 = 1.0;
  std::vector<std::size_t> t_grid;
  std::vector<double> eu_hat;
  std::vector<double> eu_stderr;
  std::vector<double> ess;
  std::vector<bool> censored;      // ess of the alpha-tilted weights below ess_min

  double lambda_f_alpha = 0.0;     // plug-in at the largest uncensored t
  double lambda_stderr = 0.0;
  std::size_t lambda_t = 0;
  Regime regime = Regime::Indeterminate;
  double fitted_rate = 0.0;        // -slope of log|E U| against t; > 0 when |E U| decays
  std::size_t fit_points = 0;
  double d_alpha_hat = 0.0;
  double alpha0_ref = 0.0;         // NaN when not supplied
  bool heavy_tail_warning = false; // largest t censored
};

/// Post-processing of an existing ensemble (every checkpoint is a grid point).
UtilityReport utility_from_ensemble(const PathEnsemble& ensemble, const UtilitySpec& spec,
                                    double v0 = 1.0, double ess_min = kDefaultEssMin);

/// Monte Carlo E U(V_t) on t_grid, always through log-sum-exp of alpha S_t.
UtilityReport expected_utility_curve(const MarketModel& model, const Strategy& strategy,
                                     const UtilitySpec& spec, const UtilityOptions& options);

struct UtilityLowerBound {
  double b_used = 0.0;
  std::optional<std::size_t> t_check;   // first grid t with p_fail <= 1/2
  bool holds = false;
  std::vector<std::size_t> t_grid;      // grid points checked (t >= t_check)
  std::vector<double> eu_hat;
  std::vector<double> bound;            // (1/2) V0^alpha e^{alpha b t}
};

/// Checks E U(V_t) >= (1/2) V0^alpha e^{alpha b t} past the first grid time
/// where the failure probability drops to 1/2.  alpha must lie in (0, 1).
UtilityLowerBound aea_utility_lower_bound(const GdpfReport& report, double alpha);

/// b with c + alpha b <= 0; max_b = c / (-alpha).
class InadmissibleThreshold : public InvalidArgument {
 public:
  InadmissibleThreshold(const std::string& what, double max_b)
      : InvalidArgument(what), max_b_(max_b) {}
  double max_b() const noexcept { return max_b_; }

 private:
  double max_b_;
};

struct ConverseResult {
  double c_prime = 0.0;      // c + alpha b
  double b = 0.0;
  double time_shift = 0.0;   // log(K) / c, absorbs K into the time origin
};

/// From |E U(V_t)| <= K e^{-ct} with alpha < 0, the failure probability
/// P(V_t < e^{bt}) decays at rate c + alpha b.
ConverseResult converse_gdpf(double c, double K, double alpha, double b);

}  // namespace aea
