#include "aea/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace aea {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

}  // namespace

ScgfPoint scgf_point(std::span<const double> sums, std::size_t t, double theta) {
  const std::size_t m = sums.size();
  if (m == 0 || t == 0) throw InvalidArgument("scgf: need at least one path and t >= 1");
  const double n = static_cast<double>(m);
  const double td = static_cast<double>(t);
  if (theta == 0.0) return {0.0, 0.0, n};

  double c = -kInf;
  for (double s : sums) c = std::max(c, theta * s);
  double w_sum = 0.0, w2_sum = 0.0;
  for (double s : sums) {
    const double w = std::exp(theta * s - c);
    w_sum += w;
    w2_sum += w * w;
  }
  ScgfPoint p;
  p.lambda = (c + std::log(w_sum) - std::log(n)) / td;
  p.ess = w_sum * w_sum / w2_sum;

  if (m >= 2) {
    // Leave-one-out estimates: log(W - w_m) = log W + log1p(-w_m / W).
    const double base = (c + std::log(w_sum) - std::log(n - 1.0)) / td;
    double mean = 0.0;
    std::vector<double> loo(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double frac = std::exp(theta * sums[i] - c) / w_sum;
      const double l = frac < 1.0 ? std::log1p(-frac) : std::log(std::numeric_limits<double>::min());
      loo[i] = base + l / td;
      mean += loo[i];
    }
    mean /= n;
    double acc = 0.0;
    for (double v : loo) acc += (v - mean) * (v - mean);
    p.std_error = std::sqrt((n - 1.0) / n * acc);
  }
  return p;
}

std::size_t ScgfCurve::n_valid() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

std::optional<std::size_t> ScgfCurve::index_of(double value) const {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] == value) return i;
  }
  return std::nullopt;
}

ScgfCurve estimate_scgf(std::span<const double> sums, std::size_t t,
                        std::span<const double> theta_grid, double ess_min) {
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end())) {
    throw InvalidArgument("scgf: theta grid must be sorted");
  }
  if (std::find(theta_grid.begin(), theta_grid.end(), 0.0) == theta_grid.end()) {
    throw InvalidArgument("scgf: theta grid must contain 0");
  }
  ScgfCurve curve;
  curve.t_used = t;
  curve.m_used = sums.size();
  curve.ess_min = ess_min;
  for (double th : theta_grid) {
    const auto p = scgf_point(sums, t, th);
    curve.theta.push_back(th);
    curve.lambda_hat.push_back(p.lambda);
    curve.std_error.push_back(p.std_error);
    curve.ess.push_back(p.ess);
    curve.valid.push_back(p.ess >= 2.0 && p.ess >= ess_min && std::isfinite(p.lambda));
  }
  return curve;
}

ScgfCurve estimate_scgf(const PathEnsemble& ensemble, std::span<const double> theta_grid,
                        double ess_min) {
  const std::size_t c = ensemble.n_checkpoints() - 1;
  const auto sums = ensemble.valid_sums(c);
  return estimate_scgf(sums, ensemble.time(c), theta_grid, ess_min);
}

ScgfCurve exact_curve(std::span<const double> theta_grid,
                      const std::function<double(double)>& lambda) {
  ScgfCurve curve;
  curve.ess_min = 0.0;
  for (double th : theta_grid) {
    curve.theta.push_back(th);
    curve.lambda_hat.push_back(th == 0.0 ? 0.0 : lambda(th));
    curve.std_error.push_back(0.0);
    curve.ess.push_back(kInf);
    curve.valid.push_back(true);
  }
  return curve;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw InvalidArgument("linspace: need n >= 2");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Round to 1e-12 so that symmetric grids hit 0 exactly.
    const double raw = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = std::round(raw * 1e12) / 1e12;
  }
  return v;
}

std::vector<double> default_theta_grid() { return linspace(-2.0, 2.0, 41); }

ConvexEnvelope lower_convex_envelope(std::span<const double> theta,
                                     std::span<const double> lambda) {
  ConvexEnvelope env;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    while (env.theta.size() >= 2) {
      const std::size_t k = env.theta.size();
      if (cross(env.theta[k - 2], env.lambda[k - 2], env.theta[k - 1], env.lambda[k - 1],
                theta[i], lambda[i]) <= 0.0) {
        env.theta.pop_back();
        env.lambda.pop_back();
      } else {
        break;
      }
    }
    env.theta.push_back(theta[i]);
    env.lambda.push_back(lambda[i]);
  }
  return env;
}

namespace {

ConvexEnvelope valid_envelope(const ScgfCurve& curve) {
  std::vector<double> th, la;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.valid[i]) {
      th.push_back(curve.theta[i]);
      la.push_back(curve.lambda_hat[i]);
    }
  }
  if (th.size() < 5) throw InvalidArgument("legendre: need at least 5 valid curve points");
  return lower_convex_envelope(th, la);
}

}  // namespace

RateFunction legendre(const ScgfCurve& curve, std::span<const double> x_grid) {
  RateFunction rf;
  rf.envelope = valid_envelope(curve);
  const auto& et = rf.envelope.theta;
  const auto& el = rf.envelope.lambda;
  const std::size_t k = et.size();
  const double slope_lo = (el[1] - el[0]) / (et[1] - et[0]);
  const double slope_hi = (el[k - 1] - el[k - 2]) / (et[k - 1] - et[k - 2]);

  rf.x_grid.assign(x_grid.begin(), x_grid.end());
  double best = kInf;
  for (double x : x_grid) {
    if (x < slope_lo || x > slope_hi) {
      rf.lambda_star.push_back(kInf);
      rf.boundary.push_back(true);
      continue;
    }
    double v = -kInf;
    for (std::size_t i = 0; i < k; ++i) v = std::max(v, et[i] * x - el[i]);
    rf.lambda_star.push_back(v);
    rf.boundary.push_back(false);
    best = std::min(best, v);
  }
  // Midpoint of the grid points attaining the minimum.
  double acc = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < rf.x_grid.size(); ++i) {
    if (!rf.boundary[i] && rf.lambda_star[i] <= best + 1e-15) {
      acc += rf.x_grid[i];
      ++cnt;
    }
  }
  rf.argmin_x = cnt > 0 ? acc / static_cast<double>(cnt)
                        : std::numeric_limits<double>::quiet_NaN();
  return rf;
}

double lower_tail_rate(const ScgfCurve& curve, double x, bool* boundary) {
  const auto env = valid_envelope(curve);
  const auto& et = env.theta;
  const auto& el = env.lambda;
  const double slope_lo = (el[1] - el[0]) / (et[1] - et[0]);
  if (boundary != nullptr) *boundary = x < slope_lo;
  if (x < slope_lo) return kInf;
  // sup over theta <= 0 of theta x - Lambda_env(theta); the envelope is
  // piecewise linear so the sup sits on a vertex or at theta = 0.
  double v = -kInf;
  for (std::size_t i = 0; i < et.size() && et[i] <= 0.0; ++i) {
    v = std::max(v, et[i] * x - el[i]);
  }
  for (std::size_t i = 0; i + 1 < et.size(); ++i) {
    if (et[i] <= 0.0 && et[i + 1] > 0.0) {
      const double w = (0.0 - et[i]) / (et[i + 1] - et[i]);
      v = std::max(v, -(el[i] + w * (el[i + 1] - el[i])));
    }
  }
  return std::max(v, 0.0);
}

Alpha0Result find_alpha0(const std::function<ScgfPoint(double)>& lambda, double search_lo,
                         double scan_step, double ess_min) {
  if (!(search_lo < 0.0)) throw InvalidArgument("alpha0: search range must be [lo < 0, 0)");
  if (!(scan_step > 0.0)) throw InvalidArgument("alpha0: scan step must be > 0");

  Alpha0Result res;
  res.scanned.ess_min = ess_min;
  auto record = [&](double th, const ScgfPoint& p, bool ok) {
    res.scanned.theta.insert(res.scanned.theta.begin(), th);
    res.scanned.lambda_hat.insert(res.scanned.lambda_hat.begin(), p.lambda);
    res.scanned.std_error.insert(res.scanned.std_error.begin(), p.std_error);
    res.scanned.ess.insert(res.scanned.ess.begin(), p.ess);
    res.scanned.valid.insert(res.scanned.valid.begin(), ok);
  };

  bool seen_negative = false;
  double neg_theta = 0.0;
  const auto n_steps = static_cast<std::size_t>(std::floor(-search_lo / scan_step + 1e-9));
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double th = -static_cast<double>(i) * scan_step;
    const auto p = lambda(th);
    const bool ok = p.ess >= ess_min && p.ess >= 2.0 && std::isfinite(p.lambda);
    record(th, p, ok);
    if (!ok) {
      throw NoRootInRange("alpha0: Monte Carlo support exhausted (ESS below floor) at theta = " +
                              std::to_string(th) + " before a sign change",
                          res.scanned);
    }
    if (p.lambda < 0.0) {
      seen_negative = true;
      neg_theta = th;
    } else if (seen_negative) {
      double lo = th;        // Lambda >= 0
      double hi = neg_theta; // Lambda < 0
      for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lambda(mid).lambda >= 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      res.alpha0 = 0.5 * (lo + hi);
      return res;
    }
  }
  throw NoRootInRange("alpha0: no root in range", res.scanned);
}

Alpha0Result find_alpha0(const MarketModel& model, const Strategy& strategy,
                         const Alpha0Options& options) {
  SimulationPlan plan{model, strategy, options.t, options.paths, options.seed,
                      {options.t}, false};
  const auto ens = simulate(plan, options.exec);
  const auto sums = ens.valid_sums(0);
  const double growth =
      std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(sums.size());
  if (!(growth > 0.0)) {
    throw NoRootInRange("alpha0: growth rate estimate is not positive; no negative window",
                        ScgfCurve{});
  }
  auto fn = [&](double th) { return scgf_point(sums, options.t, th); };
  auto res = find_alpha0(fn, options.search_lo, options.scan_step, options.ess_min);
  res.scanned.t_used = options.t;
  res.scanned.m_used = sums.size();
  return res;
}

bool check_growth_bound(std::span<const GrowthSample> samples) {
  const double lo0 = std::log(0.5);
  for (const auto& s : samples) {
    const double r = std::fabs(s.x) + std::fabs(s.y);
    if (!(s.f >= lo0 - r && s.f <= 1.0 + r)) return false;
  }
  return true;
}

}  // namespace aea
