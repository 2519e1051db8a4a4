#include "aea/io.hpp"

#include <cmath>
#include <cstdio>

namespace aea {

namespace {

const char* flag(bool b) { return b ? "1" : "0"; }

void kv(std::ostream& os, const char* key, const std::string& value) {
  os << key << ',' << value << '\n';
}

void kv(std::ostream& os, const char* key, double value) { kv(os, key, format_number(value)); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_preamble(std::ostream& os, std::uint64_t seed) {
  os << "# " << kToolName << ' ' << kToolVersion << " seed=" << seed << '\n';
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens) {
  write_preamble(os, ens.plan.seed);
  os << "checkpoint_t,path_index,S,x_state\n";
  const bool states = !ens.states.empty();
  for (std::size_t c = 0; c < ens.n_checkpoints(); ++c) {
    for (std::size_t m = 0; m < ens.paths(); ++m) {
      os << ens.time(c) << ',' << m << ',' << format_number(ens.value(c, m)) << ','
         << (states ? format_number(ens.states[c * ens.paths() + m]) : std::string("nan"))
         << '\n';
    }
  }
}

void write_ergodic_csv(std::ostream& os, const ErgodicReport& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "key,value\n";
  kv(os, "nu_f_hat", r.nu_f_hat);
  kv(os, "nu_f_stderr", r.nu_f_stderr);
  kv(os, "sigma2_f_hat",
     r.sigma2_f_hat ? format_number(*r.sigma2_f_hat) : std::string("unavailable"));
  kv(os, "burn_in", std::to_string(r.burn_in));
  kv(os, "batch_length", std::to_string(r.batch_length));
  kv(os, "n_batches", std::to_string(r.n_batches));
  kv(os, "samples", std::to_string(r.samples));
  kv(os, "f_sample_variance", r.f_sample_variance);
  kv(os, "constant_f_flag", flag(r.constant_f_flag));
}

void write_histogram_csv(std::ostream& os, const InvariantHistogram& h, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "x_lo,x_hi,y_lo,y_hi,mass\n";
  for (std::size_t i = 0; i < h.nx(); ++i) {
    for (std::size_t j = 0; j < h.ny(); ++j) {
      os << format_number(h.x_edges[i]) << ',' << format_number(h.x_edges[i + 1]) << ','
         << format_number(h.y_edges[j]) << ',' << format_number(h.y_edges[j + 1]) << ','
         << format_number(h.at(i, j)) << '\n';
    }
  }
}

void write_scgf_csv(std::ostream& os, const ScgfCurve& c, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "theta,lambda_hat,stderr,ess,valid\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << format_number(c.theta[i]) << ',' << format_number(c.lambda_hat[i]) << ','
       << format_number(c.std_error[i]) << ',' << format_number(c.ess[i]) << ','
       << flag(c.valid[i]) << '\n';
  }
}

void write_rate_csv(std::ostream& os, const RateFunction& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "x,lambda_star,boundary_flag\n";
  for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
    os << format_number(r.x_grid[i]) << ',' << format_number(r.lambda_star[i]) << ','
       << flag(r.boundary[i]) << '\n';
  }
}

void write_gdpf_csv(std::ostream& os, const GdpfReport& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "t,p_fail_hat,stderr,censored\n";
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    os << r.t_grid[i] << ',' << format_number(r.p_fail_hat[i]) << ','
       << format_number(r.p_stderr[i]) << ',' << flag(r.censored[i]) << '\n';
  }
}

void write_gdpf_summary(std::ostream& os, const GdpfReport& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "key,value\n";
  kv(os, "growth_threshold", r.growth_threshold);
  kv(os, "threshold_auto", flag(r.threshold_auto));
  kv(os, "paths", std::to_string(r.paths));
  kv(os, "c_hat", r.c_hat ? format_number(*r.c_hat) : std::string("unavailable"));
  kv(os, "fit_r2", r.fit_r2);
  kv(os, "c_lower_bound",
     r.c_lower_bound ? format_number(*r.c_lower_bound) : std::string("unavailable"));
  kv(os, "c_window", r.c_window);
  kv(os, "c_predicted", r.c_predicted);
  kv(os, "c_predicted_boundary", flag(r.c_predicted_boundary));
  kv(os, "nu_f_used", r.nu_f_used);
  kv(os, "nu_f_stderr", r.nu_f_stderr);
  kv(os, "upper_half_nonincreasing", flag(r.upper_half_nonincreasing));
  kv(os, "verdict", to_string(r.verdict));
}

void write_gdpf_plot(std::ostream& os, const GdpfReport& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "# t log_p_fail\n";
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    if (r.p_fail_hat[i] > 0.0) {
      os << r.t_grid[i] << ' ' << format_number(std::log(r.p_fail_hat[i])) << '\n';
    }
  }
}

void write_utility_csv(std::ostream& os, const UtilityReport& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "t,eu_hat,stderr,censored\n";
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    os << r.t_grid[i] << ',' << format_number(r.eu_hat[i]) << ','
       << format_number(r.eu_stderr[i]) << ',' << flag(r.censored[i]) << '\n';
  }
}

void write_utility_summary(std::ostream& os, const UtilityReport& r, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "key,value\n";
  kv(os, "alpha", r.alpha);
  kv(os, "lambda_f_alpha", r.lambda_f_alpha);
  kv(os, "lambda_stderr", r.lambda_stderr);
  kv(os, "lambda_t", std::to_string(r.lambda_t));
  kv(os, "regime", to_string(r.regime));
  kv(os, "fitted_rate", r.fitted_rate);
  kv(os, "d_alpha_hat", r.d_alpha_hat);
  kv(os, "alpha0_ref", r.alpha0_ref);
  kv(os, "heavy_tail_warning", flag(r.heavy_tail_warning));
}

void write_margin_csv(std::ostream& os, const DriftCertificate& c, std::uint64_t seed) {
  write_preamble(os, seed);
  os << "x,log_pev,bound,margin\n";
  for (const auto& p : c.margin_curve) {
    os << format_number(p.x) << ',' << format_number(p.log_pev) << ','
       << format_number(p.bound) << ',' << format_number(p.margin) << '\n';
  }
}

void write_certificate_summary(std::ostream& os, const DriftCertificate& c,
                               std::uint64_t seed) {
  write_preamble(os, seed);
  os << "key,value\n";
  kv(os, "q", c.q);
  kv(os, "delta", c.delta);
  kv(os, "K", c.K);
  kv(os, "lyapunov_offset", c.lyapunov_offset);
  kv(os, "x_max", c.x_max);
  kv(os, "x_lo", c.x_lo);
  kv(os, "best_annulus_margin", c.best_annulus_margin);
  kv(os, "feasible", flag(c.feasible));
}

void write_assumption_report(std::ostream& os, const AssumptionReport& r,
                             const std::string& model_name) {
  auto yn = [](bool b) { return b ? "true" : "false"; };
  os << "model: " << model_name << '\n';
  os << "grid: |x| <= " << format_number(r.grid.x_max) << ", annulus from "
     << format_number(r.grid.x_lo) << ", " << r.grid.points << " points\n";
  os << "A1 (positive transition density): " << yn(r.a1_ok)
     << "  min log density " << format_number(r.log_density_min) << '\n';
  os << "A2 (finite drift, positive bounded vol): " << yn(r.a2_ok)
     << "  vol min " << format_number(r.vol_min) << ", bound "
     << format_number(r.vol_bound) << '\n';
  os << "A3 (mean reversion): " << yn(r.a3_ok)
     << "  sup |x + mu(x)| / |x| on annulus " << format_number(r.a3_ratio_sup) << '\n';
  os << "A4 (exponential square moment): " << yn(r.a4_ok)
     << "  kappa " << format_number(r.kappa_used) << ", I " << format_number(r.I_value)
     << '\n';
  for (const auto& p : r.kappa_probes) {
    os << "  kappa " << format_number(p.kappa) << " -> "
       << (p.value ? format_number(*p.value) : std::string("divergent")) << '\n';
  }
  os << "RC+ (positive drift region): " << yn(r.rc_plus_ok)
     << "  grid fraction " << format_number(r.rc_plus_fraction) << '\n';
  for (const auto& iv : r.r_plus_intervals) {
    os << "  [" << (iv.lo_unbounded ? std::string("edge") : format_number(iv.lo)) << ", "
       << (iv.hi_unbounded ? std::string("edge") : format_number(iv.hi)) << "]\n";
  }
  os << "sub-gaussian constant: " << format_number(r.subgaussian_c) << '\n';
  os << "all: " << yn(r.all_ok()) << '\n';
  os << "note: the minorization part of the drift condition is not checked numerically; "
        "it holds for bounded noise densities with bounded vol\n";
}

}  // namespace aea
