#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aea/model.hpp"
#include "aea/strategy.hpp"

namespace aea {

struct SimulationPlan {
  MarketModel model;
  Strategy strategy;
  std::size_t horizon = 1;             // t_max
  std::size_t paths = 1;               // M
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;  // strictly increasing, within [1, horizon]
  bool record_states = false;

  /// Throws InvalidArgument when the plan is malformed.
  void validate() const;
};

struct ExcludedPath {
  std::size_t path_index;
  std::size_t step;     // time index at which the state became non-finite
  double last_state;    // last finite X before the failure
  std::string reason;
};

/// Log-wealth sums S_t = sum_{n<=t} f(Phi_n) at each checkpoint for every
/// path.  Storage is checkpoint-major: value(c, m) = sums[c * paths + m].
/// Excluded paths keep NaN entries and are listed in `excluded`.
struct PathEnsemble {
  SimulationPlan plan;
  std::vector<double> sums;
  std::vector<double> states;   // same layout; empty unless record_states
  std::vector<ExcludedPath> excluded;

  std::size_t paths() const { return plan.paths; }
  std::size_t n_checkpoints() const { return plan.checkpoints.size(); }
  std::size_t time(std::size_t c) const { return plan.checkpoints[c]; }

  std::span<const double> sums_at(std::size_t c) const {
    return {sums.data() + c * plan.paths, plan.paths};
  }
  std::span<const double> states_at(std::size_t c) const {
    return {states.data() + c * plan.paths, plan.paths};
  }
  double value(std::size_t c, std::size_t m) const { return sums[c * plan.paths + m]; }

  /// Index of checkpoint time t, if recorded.
  std::optional<std::size_t> checkpoint_index(std::size_t t) const;

  /// S values at checkpoint c for the paths that were not excluded.
  std::vector<double> valid_sums(std::size_t c) const;

  /// Stream identifier of path m (its index under plan.seed).
  std::uint64_t stream_id(std::size_t m) const { return m; }
};

/// Degree of parallelism; 0 selects std::thread::hardware_concurrency().
struct Execution {
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

/// Simulates plan.paths independent paths from X0.  Paths are split into
/// contiguous blocks over workers; the result does not depend on the
/// number of workers.
PathEnsemble simulate(const SimulationPlan& plan, Execution exec = {});

/// Serial reference: the horizon increments f(Phi_1), ..., f(Phi_T) of one path.
std::vector<double> path_increments(const SimulationPlan& plan, std::size_t path_index);

/// Checkpoints 1..horizon spaced evenly (always containing horizon).
std::vector<std::size_t> even_checkpoints(std::size_t horizon, std::size_t count);

}  // namespace aea
