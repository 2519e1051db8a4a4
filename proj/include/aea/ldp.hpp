#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "aea/engine.hpp"
#include "aea/error.hpp"

namespace aea {

inline constexpr double kDefaultEssMin = 100.0;

/// Plug-in estimate of Lambda_f(theta) = (1/t) log E exp(theta S_t) at one theta.
struct ScgfPoint {
  double lambda = 0.0;
  double std_error = 0.0;  // path-level jackknife
  double ess = 0.0;        // (sum w)^2 / sum w^2, w = exp(theta S)
};

ScgfPoint scgf_point(std::span<const double> sums, std::size_t t, double theta);

struct ScgfCurve {
  std::vector<double> theta;
  std::vector<double> lambda_hat;
  std::vector<double> std_error;
  std::vector<double> ess;
  std::vector<bool> valid;     // ess >= ess_min (never for ess < 2)
  std::size_t t_used = 0;
  std::size_t m_used = 0;
  double ess_min = kDefaultEssMin;

  std::size_t size() const { return theta.size(); }
  std::size_t n_valid() const;
  /// Index of theta == value, if present on the grid.
  std::optional<std::size_t> index_of(double value) const;
};

/// Evaluates the plug-in SCGF of the ensemble's final checkpoint on a grid.
/// The grid must contain 0.
ScgfCurve estimate_scgf(const PathEnsemble& ensemble, std::span<const double> theta_grid,
                        double ess_min = kDefaultEssMin);

/// Same, from raw per-path sums at time t.
ScgfCurve estimate_scgf(std::span<const double> sums, std::size_t t,
                        std::span<const double> theta_grid,
                        double ess_min = kDefaultEssMin);

/// An exactly known curve wrapped as an all-valid ScgfCurve.
ScgfCurve exact_curve(std::span<const double> theta_grid,
                      const std::function<double(double)>& lambda);

std::vector<double> linspace(double lo, double hi, std::size_t n);

/// 41 uniform points on [-2, 2].
std::vector<double> default_theta_grid();

struct ConvexEnvelope {
  std::vector<double> theta;
  std::vector<double> lambda;
};

/// Lower convex hull of the points (theta sorted ascending).
ConvexEnvelope lower_convex_envelope(std::span<const double> theta,
                                     std::span<const double> lambda);

/// Convex conjugate Lambda*(x) = sup_theta (theta x - Lambda_env(theta)).
struct RateFunction {
  std::vector<double> x_grid;
  std::vector<double> lambda_star;   // +inf where boundary is set
  std::vector<bool> boundary;        // x outside the envelope slope range
  double argmin_x = 0.0;
  ConvexEnvelope envelope;
};

/// Requires >= 5 valid curve points.
RateFunction legendre(const ScgfCurve& curve, std::span<const double> x_grid);

/// inf_{y <= x} Lambda*(y): the exponential rate of P(S_t / t <= x).
double lower_tail_rate(const ScgfCurve& curve, double x, bool* boundary = nullptr);

class NoRootInRange : public Error {
 public:
  NoRootInRange(const std::string& what, ScgfCurve scanned)
      : Error(what), curve_(std::move(scanned)) {}
  const ScgfCurve& curve() const { return curve_; }

 private:
  ScgfCurve curve_;
};

struct Alpha0Result {
  double alpha0 = 0.0;
  ScgfCurve scanned;   // the scan from -step down to the bracket
};

/// Scans theta from 0 towards search_lo in `scan_step` increments, brackets
/// the first sign change of Lambda from negative to non-negative and bisects.
/// Throws NoRootInRange when no reliable sign change exists.
Alpha0Result find_alpha0(const std::function<ScgfPoint(double)>& lambda, double search_lo,
                         double scan_step = 0.01, double ess_min = kDefaultEssMin);

struct Alpha0Options {
  double search_lo = -2.0;
  double scan_step = 0.01;
  std::size_t t = 20;
  std::size_t paths = 100'000;
  std::uint64_t seed = 0;
  double ess_min = kDefaultEssMin;
  Execution exec{};
};

/// Simulates an ensemble to time t and locates alpha0 on its plug-in SCGF.
/// Requires a positive ensemble growth rate (mean S_t / t > 0).
Alpha0Result find_alpha0(const MarketModel& model, const Strategy& strategy,
                         const Alpha0Options& options);

struct GrowthSample {
  double x;
  double y;
  double f;
};

/// True iff log(1/2) - |x| - |y| <= f <= 1 + |x| + |y| for every sample.
bool check_growth_bound(std::span<const GrowthSample> samples);

}  // namespace aea
