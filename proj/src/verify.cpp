#include "aea/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "aea/error.hpp"
#include "aea/ldp.hpp"

namespace aea {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12);
}

// Integral of g(e) * gamma(e) over the whole support of the noise law,
// for tabulated laws segment by segment.
template <class G>
double tabulated_expectation(const TabulatedNoise& t, G&& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.x.size(); ++i) {
    const double x0 = t.x[i], x1 = t.x[i + 1];
    const double d0 = t.density[i], d1 = t.density[i + 1];
    // The integrand is smooth inside a segment; a fixed rule is enough.
    acc += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double e) { return g(e) * (d0 + (d1 - d0) * (e - x0) / (x1 - x0)); }, x0, x1);
  }
  return acc;
}

double gaussian_pdf(double e, double sd) {
  const double z = e / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

}  // namespace

std::optional<double> exp_square_moment(const NoiseSpec& noise, double kappa) {
  if (const auto* t = noise.as_tabulated()) {
    return tabulated_expectation(*t, [kappa](double e) { return std::exp(kappa * e * e); });
  }
  const double sd = noise.as_gaussian()->sd;
  auto half = [&](double L) {
    return 2.0 * integrate(
                     [&](double e) { return std::exp(kappa * e * e) * gaussian_pdf(e, sd); },
                     0.0, L);
  };
  double prev = half(8.0 * sd);
  for (double L = 16.0 * sd; L <= 1024.0 * sd; L *= 2.0) {
    const double cur = half(L);
    if (!std::isfinite(cur)) return std::nullopt;
    if (std::fabs(cur - prev) <= 1e-12 * cur) return cur;
    prev = cur;
  }
  return std::nullopt;
}

double abs_exp_moment(const NoiseSpec& noise, double a) {
  if (const auto* t = noise.as_tabulated()) {
    return tabulated_expectation(*t, [a](double e) { return std::exp(a * std::fabs(e)); });
  }
  const double sd = noise.as_gaussian()->sd;
  const double hi = a * sd * sd + 40.0 * sd;
  return 2.0 * integrate([&](double e) { return std::exp(a * e) * gaussian_pdf(e, sd); }, 0.0,
                         hi);
}

double subgaussian_constant(const NoiseSpec& noise, std::span<const double> a_grid) {
  double c = 0.0;
  for (double a : a_grid) {
    if (a < 1.0) continue;
    c = std::max(c, std::log(abs_exp_moment(noise, a)) / (a * a));
  }
  return c;
}

AssumptionReport check_assumptions(const MarketModel& model, const AssumptionGrid& grid) {
  if (!(grid.x_max > grid.x_lo) || !(grid.x_lo > 0.0) || grid.points < 3) {
    throw InvalidArgument("verify: need 0 < x_lo < x_max and >= 3 grid points");
  }
  AssumptionReport rep;
  rep.grid = grid;
  const auto xs = linspace(-grid.x_max, grid.x_max, grid.points);
  const NoiseSpec& noise = model.noise();

  // (A1): log gamma finite (density bounded away from 0) and gamma bounded.
  rep.log_density_min = kInf;
  bool density_bounded = true;
  for (double x : xs) {
    const double ld = noise.log_density(x);
    rep.log_density_min = std::min(rep.log_density_min, ld);
    if (ld == kInf || std::isnan(ld)) density_bounded = false;
  }
  rep.a1_ok = std::isfinite(rep.log_density_min) && density_bounded;

  // (A2)
  rep.vol_min = kInf;
  bool drift_finite = true;
  for (double x : xs) {
    rep.vol_min = std::min(rep.vol_min, model.vol(x));
    if (!std::isfinite(model.drift(x))) drift_finite = false;
  }
  rep.vol_bound = model.vol_bound();
  rep.a2_ok = drift_finite && rep.vol_min > 0.0 && std::isfinite(rep.vol_bound);

  // (A3) on the outer annulus.
  rep.a3_ratio_sup = 0.0;
  for (double x : xs) {
    if (std::fabs(x) < grid.x_lo) continue;
    rep.a3_ratio_sup = std::max(rep.a3_ratio_sup, std::fabs(x + model.drift(x)) / std::fabs(x));
  }
  rep.a3_ok = rep.a3_ratio_sup < 1.0 - grid.eta;

  // (RC+)
  std::size_t positive = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(model.drift(xs[i]) > 0.0)) continue;
    ++positive;
    const bool opens = i == 0 || !(model.drift(xs[i - 1]) > 0.0);
    if (opens) rep.r_plus_intervals.push_back({xs[i], xs[i], i == 0, false});
    auto& cur = rep.r_plus_intervals.back();
    if (i + 1 == xs.size()) {
      cur.hi = xs[i];
      cur.hi_unbounded = true;
    } else {
      cur.hi = xs[i + 1];
    }
  }
  rep.rc_plus_fraction = static_cast<double>(positive) / static_cast<double>(xs.size());
  rep.rc_plus_ok = rep.rc_plus_fraction > 0.0;

  // (A4) along a decreasing kappa ladder.
  double kappa = noise.kappa();
  for (std::size_t k = 0; k < grid.kappa_ladder; ++k, kappa *= 0.5) {
    rep.kappa_probes.push_back({kappa, exp_square_moment(noise, kappa)});
  }
  for (const auto& p : rep.kappa_probes) {
    if (p.value) {
      rep.a4_ok = std::fabs(noise.mean()) < 1e-9;
      rep.kappa_used = p.kappa;
      rep.I_value = *p.value;
      break;
    }
  }

  const double a_grid[] = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  rep.subgaussian_c = subgaussian_constant(noise, a_grid);
  return rep;
}

// --- drift condition ---------------------------------------------------------

double log_pev(const MarketModel& model, double x, double q) {
  if (const auto* g = model.noise().as_gaussian()) {
    const double s = model.vol(x) * g->sd;
    const double m = x + model.drift(x);
    const double d = 1.0 - 2.0 * q * s * s;
    if (!(d > 0.0)) {
      throw IntegrabilityFailure("P e^V diverges: 1 - 2 q sigma(x)^2 <= 0 at x = " +
                                 std::to_string(x));
    }
    return 1.0 + q * m * m / d - 0.5 * std::log(d);
  }
  return std::log(pev_quadrature(model, x, q));
}

double pev(const MarketModel& model, double x, double q) { return std::exp(log_pev(model, x, q)); }

double pev_quadrature(const MarketModel& model, double x, double q) {
  const double m = x + model.drift(x);
  const double sig = model.vol(x);
  const NoiseSpec& noise = model.noise();
  auto expo = [&](double e) {
    const double z = m + sig * e;
    return 1.0 + q * z * z + noise.log_density(e);
  };
  if (const auto* g = noise.as_gaussian()) {
    const double s2 = g->sd * g->sd;
    const double d = 1.0 - 2.0 * q * sig * sig * s2;
    if (!(d > 0.0)) throw IntegrabilityFailure("P e^V diverges for this q");
    const double centre = 2.0 * q * sig * m * s2 / d;
    const double width = g->sd / std::sqrt(d);
    const double peak = expo(centre);
    const double val = integrate([&](double e) { return std::exp(expo(e) - peak); },
                                 centre - 40.0 * width, centre + 40.0 * width);
    return std::exp(peak) * val;
  }
  const auto& t = *noise.as_tabulated();
  double peak = -kInf;
  for (double e : t.x) peak = std::max(peak, 1.0 + q * (m + sig * e) * (m + sig * e));
  const double val = tabulated_expectation(t, [&](double e) {
    const double z = m + sig * e;
    return std::exp(1.0 + q * z * z - peak);
  });
  return std::exp(peak) * val;
}

DriftCertificate evaluate_drift_certificate(const MarketModel& model, double q, double delta,
                                            const DriftGrid& grid) {
  if (!(q > 0.0) || !(delta > 0.0) || !(delta < 1.0)) {
    throw InvalidArgument("drift certificate: need q > 0 and 0 < delta < 1");
  }
  if (!(grid.x_max > grid.x_lo) || !(grid.x_lo > 0.0) || grid.points < 3) {
    throw InvalidArgument("drift certificate: need 0 < x_lo < x_max and >= 3 points");
  }
  DriftCertificate cert;
  cert.q = q;
  cert.delta = delta;
  cert.x_max = grid.x_max;
  cert.x_lo = grid.x_lo;

  const auto xs = linspace(-grid.x_max, grid.x_max, grid.points);
  const double spacing = xs[1] - xs[0];
  std::vector<double> lp(xs.size()), raw(xs.size());
  double K = 0.0;
  cert.best_annulus_margin = kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    lp[i] = log_pev(model, x, q);
    raw[i] = (1.0 - delta) * (1.0 + q * x * x) - lp[i];
    if (raw[i] < 0.0) K = std::max(K, std::fabs(x));
    if (std::fabs(x) >= grid.x_lo) cert.best_annulus_margin = std::min(cert.best_annulus_margin, raw[i]);
  }
  K = std::max(K, spacing);
  double b = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::fabs(xs[i]) <= K) b = std::max(b, -raw[i]);
  }
  cert.K = K;
  cert.lyapunov_offset = b;
  cert.feasible = K < grid.x_lo;
  cert.margin_curve.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double in_c = std::fabs(xs[i]) <= K ? b : 0.0;
    const double bound = (1.0 - delta) * (1.0 + q * xs[i] * xs[i]) + in_c;
    cert.margin_curve.push_back({xs[i], lp[i], bound, bound - lp[i]});
  }
  return cert;
}

std::vector<double> default_q_grid() { return {0.01, 0.02, 0.05, 0.1}; }
std::vector<double> default_delta_grid() { return {0.01, 0.05, 0.1, 0.2}; }

DriftCertificate search_drift_certificate(const MarketModel& model, std::vector<double> q_grid,
                                          std::vector<double> delta_grid,
                                          const DriftGrid& grid) {
  if (q_grid.empty() || delta_grid.empty()) {
    throw InvalidArgument("drift certificate: empty q or delta grid");
  }
  std::sort(q_grid.begin(), q_grid.end());
  std::sort(delta_grid.begin(), delta_grid.end());
  const double m2 = model.vol_bound() * model.vol_bound();
  std::optional<DriftCertificate> best;
  for (double q : q_grid) {
    if (!(q * m2 < model.noise().kappa() / 2.0)) continue;
    for (double delta : delta_grid) {
      DriftCertificate c;
      try {
        c = evaluate_drift_certificate(model, q, delta, grid);
      } catch (const IntegrabilityFailure&) {
        continue;
      }
      if (c.feasible) return c;
      if (!best || c.best_annulus_margin > best->best_annulus_margin) best = std::move(c);
    }
  }
  if (!best) {
    DriftCertificate none;
    none.x_max = grid.x_max;
    none.x_lo = grid.x_lo;
    none.best_annulus_margin = -kInf;
    return none;
  }
  return *best;
}

bool replay_certificate(const MarketModel& model, const DriftCertificate& cert) {
  for (const auto& p : cert.margin_curve) {
    const double lp = log_pev(model, p.x, cert.q);
    const double in_c = std::fabs(p.x) <= cert.K ? cert.lyapunov_offset : 0.0;
    const double bound = (1.0 - cert.delta) * (1.0 + cert.q * p.x * p.x) + in_c;
    if (bound - lp < -1e-12) return false;
  }
  return true;
}

}  // namespace aea
