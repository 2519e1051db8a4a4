#include "aea/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aea/ergodic.hpp"
#include "aea/error.hpp"
#include "aea/ldp.hpp"
#include "aea/rng.hpp"

namespace aea {

namespace {

constexpr std::size_t kMinEvents = 10;

// Sub-seed tags keep the three random inputs of a certificate disjoint.
constexpr std::uint64_t kTagErgodic = 1;
constexpr std::uint64_t kTagScgf = 2;

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GdpfSupported:
      return "GDPF_supported";
    case Verdict::Refuted:
      return "refuted";
    default:
      return "inconclusive";
  }
}

GdpfReport failure_table(const PathEnsemble& ensemble, double growth_threshold, double v0) {
  GdpfReport rep;
  rep.growth_threshold = growth_threshold;
  rep.v0 = v0;
  for (std::size_t c = 0; c < ensemble.n_checkpoints(); ++c) {
    const std::size_t t = ensemble.time(c);
    const auto sums = ensemble.valid_sums(c);
    const double level = growth_threshold * static_cast<double>(t);
    std::size_t fails = 0;
    for (double s : sums) fails += s < level ? 1 : 0;
    const double m = static_cast<double>(sums.size());
    const double p = static_cast<double>(fails) / m;
    rep.paths = sums.size();
    rep.t_grid.push_back(t);
    rep.failures.push_back(fails);
    rep.p_fail_hat.push_back(p);
    rep.p_stderr.push_back(std::sqrt(p * (1.0 - p) / m));
    rep.censored.push_back(fails < kMinEvents || sums.size() - fails < kMinEvents);
  }
  return rep;
}

std::optional<DecayFit> fit_decay_rate(std::span<const std::size_t> t, std::span<const double> p,
                                       const std::vector<bool>& use) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (use[i] && p[i] > 0.0) {
      xs.push_back(static_cast<double>(t[i]));
      ys.push_back(std::log(p[i]));
    }
  }
  if (xs.size() < 4) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return DecayFit{-slope, my - slope * mx, r2, xs.size()};
}

void classify_gdpf(GdpfReport& rep, std::span<const double> c_ladder) {
  const std::size_t n = rep.t_grid.size();
  const std::size_t half = n / 2;

  std::vector<bool> use(n);
  for (std::size_t i = 0; i < n; ++i) use[i] = !rep.censored[i];
  if (const auto fit = fit_decay_rate(rep.t_grid, rep.p_fail_hat, use)) {
    rep.c_hat = fit->rate;
    rep.fit_r2 = fit->r2;
  }

  const bool no_failures =
      std::all_of(rep.failures.begin(), rep.failures.end(), [](std::size_t f) { return f == 0; });
  if (no_failures && rep.paths > 0) {
    rep.c_lower_bound = std::log(static_cast<double>(rep.paths)) /
                        static_cast<double>(rep.t_grid.front());
  }

  rep.upper_half_nonincreasing = true;
  for (std::size_t i = half; i + 1 < n; ++i) {
    const double tol = 2.0 * std::hypot(rep.p_stderr[i], rep.p_stderr[i + 1]);
    if (rep.p_fail_hat[i + 1] > rep.p_fail_hat[i] + tol) rep.upper_half_nonincreasing = false;
  }

  rep.c_window = std::numeric_limits<double>::infinity();
  for (std::size_t i = half; i < n; ++i) {
    const double upper = std::min(1.0, rep.p_fail_hat[i] + 2.0 * rep.p_stderr[i]);
    const double c = upper > 0.0 ? -std::log(upper) / static_cast<double>(rep.t_grid[i])
                                 : std::numeric_limits<double>::infinity();
    rep.c_window = std::min(rep.c_window, c);
  }

  const double c_min = c_ladder.empty() ? 1e-4 : *std::min_element(c_ladder.begin(), c_ladder.end());
  bool refuted = false;
  for (std::size_t i = half; i < n; ++i) {
    const double t = static_cast<double>(rep.t_grid[i]);
    if (rep.p_fail_hat[i] - 5.0 * rep.p_stderr[i] > std::exp(-c_min * t)) refuted = true;
  }

  if (refuted) {
    rep.verdict = Verdict::Refuted;
  } else if (no_failures) {
    rep.verdict = Verdict::GdpfSupported;
  } else if (rep.c_hat && *rep.c_hat > 0.0 && rep.c_window > 0.0 &&
             rep.upper_half_nonincreasing) {
    rep.verdict = Verdict::GdpfSupported;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
}

GdpfReport certify_gdpf(const MarketModel& model, const Strategy& strategy,
                        const GdpfOptions& options) {
  if (options.t_grid.empty()) throw InvalidArgument("gdpf: empty t grid");
  if (!(options.v0 > 0.0)) throw InvalidArgument("gdpf: V0 must be > 0");

  double b = 0.0;
  double nu = std::numeric_limits<double>::quiet_NaN();
  double nu_se = nu;
  if (options.growth_threshold) {
    b = *options.growth_threshold;
    if (!(b > 0.0)) throw InvalidArgument("gdpf: growth threshold b must be > 0");
  } else {
    ErgodicOptions eo;
    eo.length = options.ergodic_length;
    eo.seed = mix_seed(options.seed, kTagErgodic);
    const auto erg = run_ergodic(model, strategy, eo);
    if (!(erg.nu_f_hat > 0.0)) {
      throw InvalidArgument("gdpf: automatic threshold needs a positive growth rate estimate");
    }
    b = erg.nu_f_hat / 2.0;
    nu = erg.nu_f_hat;
    nu_se = erg.nu_f_stderr;
  }

  std::vector<std::size_t> grid = options.t_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  SimulationPlan plan{model, strategy, grid.back(), options.paths, options.seed, grid, false};
  auto ens = std::make_shared<PathEnsemble>(simulate(plan, options.exec));

  GdpfReport rep = failure_table(*ens, b, options.v0);
  rep.threshold_auto = !options.growth_threshold;
  if (std::isnan(nu)) {
    // Explicit threshold: growth rate from the ensemble at the last checkpoint.
    const auto last = ens->valid_sums(ens->n_checkpoints() - 1);
    const double t = static_cast<double>(grid.back());
    double mean = 0.0, sq = 0.0;
    for (double v : last) mean += v / t;
    mean /= static_cast<double>(last.size());
    for (double v : last) sq += (v / t - mean) * (v / t - mean);
    nu = mean;
    nu_se = last.size() > 1
                ? std::sqrt(sq / static_cast<double>(last.size() - 1) / static_cast<double>(last.size()))
                : 0.0;
  }
  rep.nu_f_used = nu;
  rep.nu_f_stderr = nu_se;
  rep.ensemble = ens;

  const auto theta = options.theta_grid.empty() ? linspace(-1.0, 1.0, 101) : options.theta_grid;
  SimulationPlan splan{model, strategy, options.scgf_t, options.scgf_paths,
                       mix_seed(options.seed, kTagScgf), {options.scgf_t}, false};
  const auto sens = simulate(splan, options.exec);
  const auto curve = estimate_scgf(sens, theta);
  try {
    rep.c_predicted = lower_tail_rate(curve, b, &rep.c_predicted_boundary);
  } catch (const InvalidArgument&) {
    rep.c_predicted = std::numeric_limits<double>::quiet_NaN();
    rep.c_predicted_boundary = true;
  }

  classify_gdpf(rep, options.c_ladder);
  return rep;
}

std::optional<std::size_t> aea_check(const GdpfReport& report, double epsilon) {
  std::optional<std::size_t> found;
  for (std::size_t i = report.t_grid.size(); i-- > 0;) {
    if (report.p_fail_hat[i] + 2.0 * report.p_stderr[i] <= epsilon) {
      found = report.t_grid[i];
    } else {
      break;
    }
  }
  return found;
}

}  // namespace aea
