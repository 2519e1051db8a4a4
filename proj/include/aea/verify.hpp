#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aea/model.hpp"

namespace aea {

/// Finite-grid audit settings.  (A3) is checked on the annulus
/// |x| in [x_lo, x_max]; (A1), (A2) and (RC+) on [-x_max, x_max].
struct AssumptionGrid {
  double x_max = 50.0;
  double x_lo = 10.0;
  std::size_t points = 2001;
  double eta = 0.01;
  std::size_t kappa_ladder = 6;   // kappa, kappa/2, ..., kappa/2^(n-1)
};

struct Interval {
  double lo;
  double hi;
  bool lo_unbounded;   // touches the left edge of the audited grid
  bool hi_unbounded;   // touches the right edge
};

struct KappaProbe {
  double kappa;
  std::optional<double> value;   // E exp(kappa eps^2); empty when divergent
};

struct AssumptionReport {
  bool a1_ok = false;
  bool a2_ok = false;
  bool a3_ok = false;
  bool a4_ok = false;
  bool rc_plus_ok = false;

  double a3_ratio_sup = 0.0;
  double rc_plus_fraction = 0.0;
  std::vector<Interval> r_plus_intervals;
  double kappa_used = 0.0;
  double I_value = 0.0;
  std::vector<KappaProbe> kappa_probes;

  double log_density_min = 0.0;   // min log gamma over the grid
  double vol_min = 0.0;           // min sigma over the grid
  double vol_bound = 0.0;         // global bound M (+inf when unbounded)
  double subgaussian_c = 0.0;     // empirical c in E e^{a|eps|} <= e^{c a^2}
  AssumptionGrid grid;

  bool all_ok() const { return a1_ok && a2_ok && a3_ok && a4_ok && rc_plus_ok; }
};

AssumptionReport check_assumptions(const MarketModel& model, const AssumptionGrid& grid = {});

/// E exp(kappa eps^2) by quadrature; empty when the integral diverges.
std::optional<double> exp_square_moment(const NoiseSpec& noise, double kappa);

/// E exp(a |eps|) by quadrature.
double abs_exp_moment(const NoiseSpec& noise, double a);

/// Smallest c with E exp(a|eps|) <= exp(c a^2) on every a of the grid (a >= 1).
double subgaussian_constant(const NoiseSpec& noise, std::span<const double> a_grid);

/// log P e^V(x) for V(x) = 1 + q x^2, i.e. log E exp(1 + q (x + mu(x) + sigma(x) eps)^2).
/// Gaussian noise: closed form; tabulated noise: adaptive quadrature.
/// Throws IntegrabilityFailure when 1 - 2 q sigma_eff(x)^2 <= 0.
double log_pev(const MarketModel& model, double x, double q);
double pev(const MarketModel& model, double x, double q);

/// Independent quadrature route for P e^V(x), valid for any noise law.
double pev_quadrature(const MarketModel& model, double x, double q);

struct MarginPoint {
  double x;
  double log_pev;
  double bound;    // (1 - delta) V(x) + b 1_C(x)
  double margin;   // bound - log_pev
};

/// Certificate for log(e^{-V} P e^V) <= -delta V + b 1_{[-K, K]}.
struct DriftCertificate {
  double q = 0.0;
  double delta = 0.0;
  double K = 0.0;
  double lyapunov_offset = 0.0;   // b
  double x_max = 0.0;
  double x_lo = 0.0;
  bool feasible = false;
  double best_annulus_margin = 0.0;   // min raw slack on |x| in [x_lo, x_max]
  std::vector<MarginPoint> margin_curve;
};

struct DriftGrid {
  double x_max = 50.0;
  double x_lo = 10.0;
  std::size_t points = 10001;
};

/// Evaluates one (q, delta) pair: K is the largest grid |x| where the
/// unshifted inequality fails, b the worst slack inside [-K, K].  The pair
/// is feasible when K < x_lo.
DriftCertificate evaluate_drift_certificate(const MarketModel& model, double q, double delta,
                                            const DriftGrid& grid = {});

/// Returns the first feasible (q, delta) in lexicographic order (small q
/// first, then small delta), or the pair with the best annulus margin.
/// q values with q M^2 >= kappa / 2 are skipped.
DriftCertificate search_drift_certificate(const MarketModel& model,
                                          std::vector<double> q_grid,
                                          std::vector<double> delta_grid,
                                          const DriftGrid& grid = {});

std::vector<double> default_q_grid();
std::vector<double> default_delta_grid();

/// Recomputes every margin of the certificate from the model.
bool replay_certificate(const MarketModel& model, const DriftCertificate& cert);

}  // namespace aea
