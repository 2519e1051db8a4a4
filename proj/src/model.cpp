#include "aea/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "aea/error.hpp"
#include "aea/rng.hpp"

namespace aea {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_table(const TableMap& t, const char* what) {
  if (t.x.size() < 2 || t.x.size() != t.y.size()) {
    throw InvalidArgument(std::string(what) + ": table needs >= 2 matching (x, y) nodes");
  }
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    if (!std::isfinite(t.x[i]) || !std::isfinite(t.y[i])) {
      throw InvalidArgument(std::string(what) + ": non-finite table node");
    }
    if (i > 0 && !(t.x[i] > t.x[i - 1])) {
      throw InvalidArgument(std::string(what) + ": table x must be strictly increasing");
    }
  }
}

double table_eval(const TableMap& t, double x) {
  const auto& xs = t.x;
  const auto& ys = t.y;
  const std::size_t n = xs.size();
  if (x <= xs.front()) {
    if (t.left == Extrapolation::Flat) return ys.front();
    const double s = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    return ys[0] + s * (x - xs[0]);
  }
  if (x >= xs.back()) {
    if (t.right == Extrapolation::Flat) return ys.back();
    const double s = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    return ys[n - 1] + s * (x - xs[n - 1]);
  }
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

// Simpson's rule is exact for the polynomial moments of a piecewise-linear
// density up to order two.
template <class F>
double piecewise_moment(const std::vector<double>& x, const std::vector<double>& d,
                        F&& weight) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    const double xm = 0.5 * (x[i] + x[i + 1]);
    const double dm = 0.5 * (d[i] + d[i + 1]);
    acc += h / 6.0 *
           (weight(x[i]) * d[i] + 4.0 * weight(xm) * dm + weight(x[i + 1]) * d[i + 1]);
  }
  return acc;
}

TabulatedNoise build_tabulated(std::vector<double> x, std::vector<double> density) {
  if (x.size() < 2 || x.size() != density.size()) {
    throw InvalidArgument("tabulated noise: need >= 2 matching (point, density) nodes");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(density[i])) {
      throw InvalidArgument("tabulated noise: non-finite node");
    }
    if (!(density[i] > 0.0)) {
      throw InvalidArgument("tabulated noise: density must be strictly positive on its grid");
    }
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw InvalidArgument("tabulated noise: points must be strictly increasing");
    }
  }
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    mass += 0.5 * (x[i + 1] - x[i]) * (density[i] + density[i + 1]);
  }
  for (double& d : density) d /= mass;

  TabulatedNoise t;
  t.x = std::move(x);
  t.density = std::move(density);
  t.cdf.assign(t.x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.x.size(); ++i) {
    t.cdf[i + 1] = t.cdf[i] + 0.5 * (t.x[i + 1] - t.x[i]) * (t.density[i] + t.density[i + 1]);
  }
  t.cdf.back() = 1.0;

  constexpr std::size_t n = TabulatedNoise::kInverseTableSize;
  t.inverse.resize(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < t.x.size() && t.cdf[seg + 1] < u) ++seg;
    const double h = t.x[seg + 1] - t.x[seg];
    const double a = (t.density[seg + 1] - t.density[seg]) / (2.0 * h);
    const double b = t.density[seg];
    const double rhs = std::max(0.0, u - t.cdf[seg]);
    double s;
    if (std::fabs(a) * h < 1e-12 * b) {
      s = rhs / b;
    } else {
      const double disc = std::max(0.0, b * b + 4.0 * a * rhs);
      s = 2.0 * rhs / (b + std::sqrt(disc));
    }
    t.inverse[k] = t.x[seg] + std::clamp(s, 0.0, h);
  }
  t.inverse.front() = t.x.front();
  t.inverse.back() = t.x.back();
  return t;
}

}  // namespace

double evaluate(const ScalarMap& map, double x) {
  if (const auto* a = std::get_if<AffineMap>(&map)) return a->slope * x + a->intercept;
  if (const auto* c = std::get_if<ClampedSqrtMap>(&map)) {
    return c->scale * std::clamp(std::sqrt(std::fabs(x)), c->lo, c->hi);
  }
  return table_eval(std::get<TableMap>(map), x);
}

double supremum(const ScalarMap& map) {
  if (const auto* a = std::get_if<AffineMap>(&map)) {
    return a->slope == 0.0 ? a->intercept : kInf;
  }
  if (const auto* c = std::get_if<ClampedSqrtMap>(&map)) {
    return std::max(c->scale * c->hi, c->scale * c->lo);
  }
  const auto& t = std::get<TableMap>(map);
  const std::size_t n = t.x.size();
  if (t.left == Extrapolation::Linear && t.y[1] < t.y[0]) return kInf;
  if (t.right == Extrapolation::Linear && t.y[n - 1] > t.y[n - 2]) return kInf;
  return *std::max_element(t.y.begin(), t.y.end());
}

// --- NoiseSpec --------------------------------------------------------------

NoiseSpec NoiseSpec::gaussian(double mean, double sd, std::optional<double> kappa) {
  if (!std::isfinite(mean)) throw InvalidArgument("gaussian noise: mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw InvalidArgument("gaussian noise: sd must be > 0");
  const double k = kappa.value_or(0.25 / (sd * sd));
  if (!(k > 0.0)) throw InvalidArgument("noise: kappa must be > 0");
  return NoiseSpec(GaussianNoise{mean, sd}, k);
}

NoiseSpec NoiseSpec::tabulated(std::vector<double> x, std::vector<double> density,
                               std::optional<double> kappa) {
  auto law = build_tabulated(std::move(x), std::move(density));
  NoiseSpec spec(std::move(law), 1.0);
  const double k = kappa.value_or(0.25 / spec.variance());
  if (!(k > 0.0)) throw InvalidArgument("noise: kappa must be > 0");
  spec.kappa_ = k;
  return spec;
}

double NoiseSpec::mean() const {
  if (const auto* g = as_gaussian()) return g->mean;
  const auto& t = *as_tabulated();
  return piecewise_moment(t.x, t.density, [](double v) { return v; });
}

double NoiseSpec::variance() const {
  if (const auto* g = as_gaussian()) return g->sd * g->sd;
  const auto& t = *as_tabulated();
  const double m = mean();
  return piecewise_moment(t.x, t.density, [m](double v) { return (v - m) * (v - m); });
}

double NoiseSpec::density(double e) const {
  if (const auto* g = as_gaussian()) {
    const double z = (e - g->mean) / g->sd;
    return std::exp(-0.5 * z * z) / (g->sd * std::sqrt(2.0 * std::numbers::pi));
  }
  const auto& t = *as_tabulated();
  if (e < t.x.front() || e > t.x.back()) {
    throw OutOfSupport("tabulated noise queried outside its grid", e);
  }
  return table_eval(TableMap{t.x, t.density, Extrapolation::Flat, Extrapolation::Flat}, e);
}

double NoiseSpec::log_density(double e) const {
  if (const auto* g = as_gaussian()) {
    const double z = (e - g->mean) / g->sd;
    return -0.5 * z * z - std::log(g->sd) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const auto& t = *as_tabulated();
  if (e < t.x.front() || e > t.x.back()) return -kInf;
  return std::log(density(e));
}

double NoiseSpec::sample(double u) const {
  if (const auto* g = as_gaussian()) return g->mean + g->sd * normal_quantile(u);
  const auto& t = *as_tabulated();
  const double pos = u * static_cast<double>(t.inverse.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), t.inverse.size() - 2);
  const double w = pos - static_cast<double>(i);
  return t.inverse[i] + w * (t.inverse[i + 1] - t.inverse[i]);
}

double NoiseSpec::support_lo() const {
  if (is_gaussian()) return -kInf;
  return as_tabulated()->x.front();
}

double NoiseSpec::support_hi() const {
  if (is_gaussian()) return kInf;
  return as_tabulated()->x.back();
}

NoiseSpec NoiseSpec::centered() const {
  NoiseSpec out = *this;
  if (auto* g = std::get_if<GaussianNoise>(&out.law_)) {
    g->mean = 0.0;
    return out;
  }
  const double m = mean();
  auto& t = std::get<TabulatedNoise>(out.law_);
  for (double& v : t.x) v -= m;
  for (double& v : t.inverse) v -= m;
  return out;
}

// --- MarketModel ------------------------------------------------------------

MarketModel::MarketModel(std::string name, ScalarMap drift, ScalarMap vol,
                         NoiseSpec noise, double x0)
    : name_(std::move(name)),
      drift_(std::move(drift)),
      vol_(std::move(vol)),
      noise_(noise.centered()),
      x0_(x0),
      shift_(noise.mean()) {
  if (!std::isfinite(x0_)) throw InvalidArgument("model: x0 must be finite");
  if (const auto* t = std::get_if<TableMap>(&drift_)) validate_table(*t, "drift");
  if (const auto* a = std::get_if<AffineMap>(&drift_)) {
    if (!std::isfinite(a->slope) || !std::isfinite(a->intercept)) {
      throw InvalidArgument("drift: non-finite coefficients");
    }
  }
  if (std::holds_alternative<ClampedSqrtMap>(drift_)) {
    throw InvalidArgument("drift: clamped-sqrt maps are volatility-only");
  }
  if (const auto* a = std::get_if<AffineMap>(&vol_)) {
    if (a->slope != 0.0 || !(a->intercept > 0.0) || !std::isfinite(a->intercept)) {
      throw InvalidArgument("vol: affine volatility must be a positive constant");
    }
  } else if (const auto* c = std::get_if<ClampedSqrtMap>(&vol_)) {
    if (!(c->scale > 0.0) || !(c->lo > 0.0) || !(c->hi > c->lo)) {
      throw InvalidArgument("vol: clamped-sqrt needs scale > 0 and 0 < lo < hi");
    }
  } else {
    const auto& t = std::get<TableMap>(vol_);
    validate_table(t, "vol");
    for (double y : t.y) {
      if (!(y > 0.0)) throw InvalidArgument("vol: table values must be > 0");
    }
  }
  vol_bound_ = supremum(vol_);
}

MarketModel make_stable_ar(double alpha_ar, double x0, std::optional<NoiseSpec> noise) {
  if (!(std::fabs(alpha_ar) < 1.0) || alpha_ar == 0.0) {
    throw InvalidArgument("stable_ar: need 0 < |alpha_ar| < 1");
  }
  return MarketModel("stable_ar", AffineMap{alpha_ar - 1.0, 0.0}, AffineMap{0.0, 1.0},
                     noise.value_or(NoiseSpec::gaussian(0.0, 1.0)), x0);
}

MarketModel make_clamped_cir(double alpha_ar, double sigma0, double c1, double c2,
                             double x0, std::optional<NoiseSpec> noise) {
  if (!(std::fabs(alpha_ar) < 1.0)) throw InvalidArgument("clamped_cir: need |alpha_ar| < 1");
  if (!(sigma0 > 0.0)) throw InvalidArgument("clamped_cir: need sigma0 > 0");
  if (!(c1 > 0.0) || !(c2 > c1)) throw InvalidArgument("clamped_cir: need 0 < c1 < c2");
  return MarketModel("clamped_cir", AffineMap{alpha_ar - 1.0, 0.0},
                     ClampedSqrtMap{sigma0, c1, c2},
                     noise.value_or(NoiseSpec::gaussian(0.0, 1.0)), x0);
}

MarketModel make_drifted_walk(double m, double x0) {
  return MarketModel("drifted_walk", AffineMap{0.0, 0.0}, AffineMap{0.0, 1.0},
                     NoiseSpec::gaussian(m, 1.0), x0);
}

double step(const MarketModel& model, double x, double eps) {
  const double y = x + model.drift(x) + model.vol(x) * eps;
  if (!std::isfinite(y)) throw ModelBlowUp("model blow-up: non-finite state", x);
  return y;
}

Price price(double x) {
  if (x < -700.0) return {0.0, true};
  const double s = std::exp(x);
  if (!std::isfinite(s)) throw ModelBlowUp("price overflow", x);
  return {s, false};
}

double transition_density(const MarketModel& model, double x, double y) {
  const double s = model.vol(x);
  return model.noise().density((y - model.drift(x) - x) / s) / s;
}

double min_transition_density(const MarketModel& model, std::span<const double> grid) {
  double lo = kInf;
  for (double x : grid) {
    for (double y : grid) lo = std::min(lo, transition_density(model, x, y));
  }
  return lo;
}

}  // namespace aea
