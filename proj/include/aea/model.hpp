#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace aea {

// ---------------------------------------------------------------------------
// Scalar maps used for the drift and volatility of the log-price chain.
// ---------------------------------------------------------------------------

/// x -> slope * x + intercept.
struct AffineMap {
  double slope = 0.0;
  double intercept = 0.0;
};

/// x -> scale * clamp(sqrt|x|, lo, hi).
struct ClampedSqrtMap {
  double scale = 1.0;
  double lo = 0.0;
  double hi = 1.0;
};

enum class Extrapolation { Flat, Linear };

/// Piecewise-linear interpolation of (x, y) nodes; x strictly increasing.
struct TableMap {
  std::vector<double> x;
  std::vector<double> y;
  Extrapolation left = Extrapolation::Flat;
  Extrapolation right = Extrapolation::Flat;
};

using ScalarMap = std::variant<AffineMap, ClampedSqrtMap, TableMap>;

double evaluate(const ScalarMap& map, double x);

/// Supremum of the map over the real line (+inf when unbounded).
double supremum(const ScalarMap& map);

// ---------------------------------------------------------------------------
// Noise law of the innovations.
// ---------------------------------------------------------------------------

struct GaussianNoise {
  double mean = 0.0;
  double sd = 1.0;
};

/// Density given on a grid and interpolated linearly between the nodes.
/// The sampler is an inverse-CDF table with `kInverseTableSize` points.
struct TabulatedNoise {
  static constexpr std::size_t kInverseTableSize = 4096;

  std::vector<double> x;
  std::vector<double> density;   // normalized to unit mass
  std::vector<double> cdf;       // CDF at the nodes
  std::vector<double> inverse;   // quantiles at u = k / (N - 1)
};

class NoiseSpec {
 public:
  static NoiseSpec gaussian(double mean, double sd,
                            std::optional<double> kappa = std::nullopt);

  /// Builds a tabulated law; the density is normalized to unit mass.
  static NoiseSpec tabulated(std::vector<double> x, std::vector<double> density,
                             std::optional<double> kappa = std::nullopt);

  bool is_gaussian() const { return std::holds_alternative<GaussianNoise>(law_); }
  const GaussianNoise* as_gaussian() const { return std::get_if<GaussianNoise>(&law_); }
  const TabulatedNoise* as_tabulated() const { return std::get_if<TabulatedNoise>(&law_); }

  double mean() const;
  double variance() const;

  /// Density gamma(e).  Throws OutOfSupport for tabulated laws off the grid.
  double density(double e) const;
  /// log gamma(e); -inf outside the support of a tabulated law.
  double log_density(double e) const;
  /// Quantile function evaluated at u in (0, 1).
  double sample(double u) const;

  /// Support of the law (infinite for Gaussian).
  double support_lo() const;
  double support_hi() const;

  /// Sub-Gaussian parameter kappa of E exp(kappa eps^2) < inf.
  double kappa() const { return kappa_; }
  /// E exp(kappa eps^2) as filled in by the integrability checker.
  std::optional<double> integrability_bound() const { return i_bound_; }
  void set_integrability_bound(double value) { i_bound_ = value; }

  /// Copy of the law shifted to zero mean.
  NoiseSpec centered() const;

 private:
  using Law = std::variant<GaussianNoise, TabulatedNoise>;
  NoiseSpec(Law law, double kappa) : law_(std::move(law)), kappa_(kappa) {}

  Law law_;
  double kappa_;
  std::optional<double> i_bound_;
};

// ---------------------------------------------------------------------------
// The log-price chain X_t - X_{t-1} = mu(X_{t-1}) + sigma(X_{t-1}) eps_t.
// ---------------------------------------------------------------------------

class MarketModel {
 public:
  /// Centers the noise and folds the removed mean into the drift:
  /// mu'(x) = mu(x) + sigma(x) * m.  The shift m is kept as metadata.
  MarketModel(std::string name, ScalarMap drift, ScalarMap vol, NoiseSpec noise,
              double x0 = 0.0);

  const std::string& name() const { return name_; }
  double x0() const { return x0_; }
  const NoiseSpec& noise() const { return noise_; }
  NoiseSpec& mutable_noise() { return noise_; }
  const ScalarMap& base_drift() const { return drift_; }
  const ScalarMap& vol_map() const { return vol_; }

  /// Mean removed from the raw noise law at construction.
  double centering_shift() const { return shift_; }
  /// Global upper bound M of the volatility (+inf when unbounded).
  double vol_bound() const { return vol_bound_; }

  double drift(double x) const {
    const double base = evaluate(drift_, x);
    return shift_ == 0.0 ? base : base + evaluate(vol_, x) * shift_;
  }
  double vol(double x) const { return evaluate(vol_, x); }

 private:
  std::string name_;
  ScalarMap drift_;
  ScalarMap vol_;
  NoiseSpec noise_;
  double x0_;
  double shift_ = 0.0;
  double vol_bound_ = 0.0;
};

/// X_{t+1} = a X_t + eps, eps ~ N(0, 1)  (mu(x) = (a - 1) x, sigma = 1).
MarketModel make_stable_ar(double alpha_ar, double x0 = 0.0,
                           std::optional<NoiseSpec> noise = std::nullopt);

/// X_{t+1} = a X_t + sigma0 clamp(sqrt|X_t|, c1, c2) eps, eps ~ N(0, 1).
MarketModel make_clamped_cir(double alpha_ar, double sigma0, double c1, double c2,
                             double x0 = 0.0,
                             std::optional<NoiseSpec> noise = std::nullopt);

/// X_{t+1} = X_t + eps with eps ~ N(m, 1); after centering mu = m, sigma = 1.
MarketModel make_drifted_walk(double m, double x0 = 0.0);

/// One transition x -> x + mu(x) + sigma(x) eps.  Throws ModelBlowUp on a
/// non-finite result.
double step(const MarketModel& model, double x, double eps);

struct Price {
  double value;
  bool underflow;  // x < -700: reported as zero
};

/// S = exp(x).  Throws ModelBlowUp on overflow.
Price price(double x);

/// p(x, y) = gamma((y - mu(x) - x) / sigma(x)) / sigma(x).
double transition_density(const MarketModel& model, double x, double y);

/// Minimum of p over the square grid^2 (positivity diagnostic).
double min_transition_density(const MarketModel& model, std::span<const double> grid);

}  // namespace aea
