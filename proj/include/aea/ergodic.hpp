#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aea/model.hpp"
#include "aea/strategy.hpp"

namespace aea {

struct ErgodicOptions {
  std::size_t length = 1'000'000;
  std::optional<std::size_t> burn_in;        // default: max(1000, length / 100)
  std::optional<std::size_t> batch_length;   // default: (length - burn_in) / 100, >= 100
  std::uint64_t seed = 0;
  double max_abs_state = 1e6;                // non-ergodicity guard on |X|
};

/// Long-run averages of f(Phi_n) along one path (time average after burn-in).
struct ErgodicReport {
  double nu_f_hat = 0.0;
  double nu_f_stderr = 0.0;
  std::optional<double> sigma2_f_hat;  // reported only with >= 20 batches
  std::size_t burn_in = 0;
  std::size_t batch_length = 0;
  std::size_t n_batches = 0;
  std::size_t samples = 0;
  double f_sample_variance = 0.0;
  bool constant_f_flag = false;        // sample variance of f below 1e-12
};

std::size_t default_burn_in(std::size_t length);

ErgodicReport run_ergodic(const MarketModel& model, const Strategy& strategy,
                          const ErgodicOptions& options);

struct MeanEstimate {
  double value;
  double std_error;
};

MeanEstimate estimate_nu_f(const MarketModel& model, const Strategy& strategy,
                           std::size_t length, std::size_t burn_in, std::uint64_t seed);

/// Batch-means asymptotic variance.  Throws InvalidArgument when fewer than
/// 20 batches of at least 100 steps fit after burn-in.
double estimate_sigma2_f(const MarketModel& model, const Strategy& strategy,
                         std::size_t length, std::size_t burn_in,
                         std::size_t batch_length, std::uint64_t seed);

/// Occupancy of Phi = (X_{t-1}, X_t) over a rectangular grid.
struct InvariantHistogram {
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<double> mass;       // (x bin) * (n_y) + (y bin); sums to 1
  std::size_t samples = 0;        // samples that fell inside the grid
  double outside_fraction = 0.0;  // share of samples outside the grid

  std::size_t nx() const { return x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.size() - 1; }
  double at(std::size_t ix, std::size_t iy) const { return mass[ix * ny() + iy]; }

  /// Mass of each x bin (marginal of X_{t-1}).
  std::vector<double> x_marginal() const;
};

InvariantHistogram empirical_invariant_histogram(const MarketModel& model,
                                                 std::size_t length, std::size_t burn_in,
                                                 std::vector<double> x_edges,
                                                 std::vector<double> y_edges,
                                                 std::uint64_t seed,
                                                 double max_abs_state = 1e6);

/// Evenly spaced edges covering [lo, hi] with n bins.
std::vector<double> uniform_edges(double lo, double hi, std::size_t n);

}  // namespace aea
