#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aea/engine.hpp"

namespace aea {

enum class Verdict { GdpfSupported, Inconclusive, Refuted };

std::string to_string(Verdict v);

struct GdpfOptions {
  std::optional<double> growth_threshold;   // b; empty selects b = nu_hat / 2
  std::vector<std::size_t> t_grid{10, 20, 30, 40, 60, 80, 100, 125, 150};
  std::size_t paths = 100'000;
  std::uint64_t seed = 0;
  double v0 = 1.0;
  std::size_t ergodic_length = 10'000'000;   // automatic threshold only
  std::size_t scgf_t = 50;    // short enough that the ESS-valid theta window reaches b
  std::size_t scgf_paths = 100'000;
  std::vector<double> theta_grid;           // empty: 101 points on [-1, 1]
  std::vector<double> c_ladder{1e-4, 1e-3, 1e-2, 1e-1};
  Execution exec{};
};

/// Empirical failure probabilities P(V_t < V0 e^{bt}) on a time grid, the
/// fitted geometric decay rate and the large-deviations prediction.
struct GdpfReport {
  double growth_threshold = 0.0;   // b
  bool threshold_auto = false;
  double v0 = 1.0;
  std::size_t paths = 0;
  std::vector<std::size_t> t_grid;
  std::vector<std::size_t> failures;
  std::vector<double> p_fail_hat;
  std::vector<double> p_stderr;
  std::vector<bool> censored;      // fewer than 10 failures or 10 successes

  std::optional<double> c_hat;     // -slope of log p vs t over estimable points
  double fit_r2 = 0.0;
  std::optional<double> c_lower_bound;   // log(M) / t_min when no failures at all
  double c_window = 0.0;           // largest c with p + 2 se <= e^{-ct} on the upper half
  double c_predicted = 0.0;        // inf_{x <= b} Lambda*(x)
  bool c_predicted_boundary = false;
  double nu_f_used = 0.0;
  double nu_f_stderr = 0.0;
  bool upper_half_nonincreasing = false;
  Verdict verdict = Verdict::Inconclusive;

  std::shared_ptr<const PathEnsemble> ensemble;   // paths behind p_fail_hat
};

/// Counts failures S_t < b t at every checkpoint of the ensemble.
GdpfReport failure_table(const PathEnsemble& ensemble, double growth_threshold, double v0 = 1.0);

struct DecayFit {
  double rate;      // -slope of log p against t
  double intercept;
  double r2;
  std::size_t points;
};

/// Least-squares line through (t, log p) over the masked points (>= 4 required).
std::optional<DecayFit> fit_decay_rate(std::span<const std::size_t> t,
                                       std::span<const double> p,
                                       const std::vector<bool>& use);

/// Fills c_hat, c_window, the monotonicity flag and the verdict.
void classify_gdpf(GdpfReport& report, std::span<const double> c_ladder);

/// Full pipeline: failure table from an ensemble and the predicted rate from
/// the plug-in SCGF of a second ensemble.  With an automatic threshold nu_hat
/// comes from one long path; otherwise from the ensemble mean of S_T / T.
GdpfReport certify_gdpf(const MarketModel& model, const Strategy& strategy,
                        const GdpfOptions& options);

/// Smallest grid t from which p_fail_hat + 2 se <= epsilon holds on the rest
/// of the grid.
std::optional<std::size_t> aea_check(const GdpfReport& report, double epsilon);

}  // namespace aea
