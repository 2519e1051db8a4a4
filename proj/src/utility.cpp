#include "aea/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aea {

void UtilitySpec::validate() const {
  if (!std::isfinite(alpha) || alpha >= 1.0 || alpha == 0.0) {
    throw InvalidArgument("utility: alpha must satisfy alpha < 1 and alpha != 0");
  }
}

double UtilitySpec::operator()(double x) const {
  const double p = std::pow(x, alpha);
  return alpha > 0.0 ? p : -p;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::DecaysToZero:
      return "decays_to_zero";
    case Regime::Diverges:
      return "diverges";
    default:
      return "indeterminate";
  }
}

UtilityReport utility_from_ensemble(const PathEnsemble& ensemble, const UtilitySpec& spec,
                                    double v0, double ess_min) {
  spec.validate();
  if (!(v0 > 0.0)) throw InvalidArgument("utility: V0 must be > 0");

  UtilityReport rep;
  rep.alpha = spec.alpha;
  rep.v0 = v0;
  rep.alpha0_ref = std::numeric_limits<double>::quiet_NaN();
  const double sign = spec.alpha > 0.0 ? 1.0 : -1.0;
  const double log_v0a = spec.alpha * std::log(v0);

  std::vector<double> log_abs;
  for (std::size_t c = 0; c < ensemble.n_checkpoints(); ++c) {
    const std::size_t t = ensemble.time(c);
    const auto sums = ensemble.valid_sums(c);
    const auto pt = scgf_point(sums, t, spec.alpha);
    const double td = static_cast<double>(t);
    const double la = log_v0a + td * pt.lambda;
    const double eu = sign * std::exp(la);
    rep.t_grid.push_back(t);
    rep.eu_hat.push_back(eu);
    rep.eu_stderr.push_back(std::abs(eu) * td * pt.std_error);
    rep.ess.push_back(pt.ess);
    rep.censored.push_back(pt.ess < ess_min);
    log_abs.push_back(la);
  }

  const std::size_t n = rep.t_grid.size();
  rep.heavy_tail_warning = n > 0 && rep.censored.back();

  std::optional<std::size_t> last;
  for (std::size_t i = n; i-- > 0;) {
    if (!rep.censored[i]) {
      last = i;
      break;
    }
  }
  if (!last) return rep;

  {
    const std::size_t t = rep.t_grid[*last];
    const auto pt = scgf_point(ensemble.valid_sums(*last), t, spec.alpha);
    rep.lambda_f_alpha = pt.lambda;
    rep.lambda_stderr = pt.std_error;
    rep.lambda_t = t;
  }
  if (rep.lambda_f_alpha < -2.0 * rep.lambda_stderr && rep.lambda_f_alpha < 0.0) {
    rep.regime = Regime::DecaysToZero;
  } else if (rep.lambda_f_alpha > 2.0 * rep.lambda_stderr && rep.lambda_f_alpha > 0.0) {
    rep.regime = Regime::Diverges;
  }

  // Least squares of log|E U| on t over the uncensored points.
  double sx = 0.0, sy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rep.censored[i]) continue;
    sx += static_cast<double>(rep.t_grid[i]);
    sy += log_abs[i];
    ++k;
  }
  rep.fit_points = k;
  if (k >= 2) {
    const double mx = sx / static_cast<double>(k), my = sy / static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (rep.censored[i]) continue;
      const double dx = static_cast<double>(rep.t_grid[i]) - mx;
      sxx += dx * dx;
      sxy += dx * (log_abs[i] - my);
    }
    rep.fitted_rate = sxx > 0.0 ? -sxy / sxx : 0.0;
  }

  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (rep.censored[i]) continue;
    const double td = static_cast<double>(rep.t_grid[i]);
    acc += sign * std::exp(log_abs[i] - log_v0a - td * rep.lambda_f_alpha);
    ++used;
  }
  rep.d_alpha_hat = used > 0 ? acc / static_cast<double>(used)
                             : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

UtilityReport expected_utility_curve(const MarketModel& model, const Strategy& strategy,
                                     const UtilitySpec& spec, const UtilityOptions& options) {
  spec.validate();
  if (options.t_grid.empty()) throw InvalidArgument("utility: empty t grid");
  std::vector<std::size_t> grid = options.t_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() == 0) throw InvalidArgument("utility: t grid must start at 1 or later");

  SimulationPlan plan{model, strategy, grid.back(), options.paths, options.seed, grid, false};
  const auto ens = simulate(plan, options.exec);
  auto rep = utility_from_ensemble(ens, spec, options.v0, options.ess_min);
  if (options.alpha0_ref) rep.alpha0_ref = *options.alpha0_ref;
  return rep;
}

UtilityLowerBound aea_utility_lower_bound(const GdpfReport& report, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("utility bound: alpha must lie in (0, 1)");
  }
  if (!report.ensemble) throw InvalidArgument("utility bound: report carries no ensemble");

  UtilityLowerBound out;
  out.b_used = report.growth_threshold;
  for (std::size_t i = 0; i < report.t_grid.size(); ++i) {
    if (report.p_fail_hat[i] <= 0.5) {
      out.t_check = report.t_grid[i];
      break;
    }
  }
  if (!out.t_check) return out;

  const auto eu = utility_from_ensemble(*report.ensemble, UtilitySpec{alpha}, report.v0,
                                        0.0);
  const double log_v0a = alpha * std::log(report.v0);
  out.holds = true;
  for (std::size_t i = 0; i < eu.t_grid.size(); ++i) {
    if (eu.t_grid[i] < *out.t_check) continue;
    const double td = static_cast<double>(eu.t_grid[i]);
    const double bound = 0.5 * std::exp(log_v0a + alpha * out.b_used * td);
    out.t_grid.push_back(eu.t_grid[i]);
    out.eu_hat.push_back(eu.eu_hat[i]);
    out.bound.push_back(bound);
    if (eu.eu_hat[i] < bound) out.holds = false;
  }
  return out;
}

ConverseResult converse_gdpf(double c, double K, double alpha, double b) {
  if (!(c > 0.0)) throw InvalidArgument("converse: c must be > 0");
  if (!(K > 0.0)) throw InvalidArgument("converse: K must be > 0");
  if (!(alpha < 0.0)) throw InvalidArgument("converse: alpha must be < 0");
  const double c_prime = c + alpha * b;
  if (!(c_prime > 0.0)) {
    const double max_b = c / (-alpha);
    throw InadmissibleThreshold("converse: c + alpha b <= 0; largest admissible b is " +
                                    std::to_string(max_b),
                                max_b);
  }
  return ConverseResult{c_prime, b, std::log(K) / c};
}

}  // namespace aea
