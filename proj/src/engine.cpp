#include "aea/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "aea/error.hpp"
#include "aea/rng.hpp"

namespace aea {

void SimulationPlan::validate() const {
  if (horizon < 1) throw InvalidArgument("plan: horizon must be >= 1");
  if (paths < 1) throw InvalidArgument("plan: paths must be >= 1");
  if (checkpoints.empty()) throw InvalidArgument("plan: checkpoints must be nonempty");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1) throw InvalidArgument("plan: checkpoints start at t = 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw InvalidArgument("plan: checkpoints must be strictly increasing");
    }
  }
  if (checkpoints.back() > horizon) throw InvalidArgument("plan: checkpoint beyond horizon");
}

std::optional<std::size_t> PathEnsemble::checkpoint_index(std::size_t t) const {
  const auto& c = plan.checkpoints;
  const auto it = std::lower_bound(c.begin(), c.end(), t);
  if (it == c.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - c.begin());
}

std::vector<double> PathEnsemble::valid_sums(std::size_t c) const {
  const auto row = sums_at(c);
  std::vector<double> out;
  out.reserve(row.size());
  for (double s : row) {
    if (!std::isnan(s)) out.push_back(s);
  }
  return out;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct PathResult {
  bool ok = true;
  ExcludedPath failure{};
};

// Runs one path, writing S (and X) at each checkpoint into the strided output.
PathResult run_path(const SimulationPlan& plan, std::size_t m, double* sums,
                    double* states) {
  const MarketModel& model = plan.model;
  const Strategy& strategy = plan.strategy;
  const NoiseSpec& noise = model.noise();
  const bool pi_plus = std::holds_alternative<PositiveDriftIndicator>(strategy.kind());
  const std::size_t stride = plan.paths;

  NoiseStream stream(plan.seed, m);
  double x = model.x0();
  double s = 0.0;
  std::size_t c = 0;
  for (std::size_t t = 1; t <= plan.horizon; ++t) {
    const double eps = noise.sample(stream.next());
    const double mu = model.drift(x);
    const double pi = pi_plus ? (mu > 0.0 ? 1.0 : 0.0) : allocate(strategy, model, x);
    const double y = x + mu + model.vol(x) * eps;
    if (!std::isfinite(y)) {
      return {false, ExcludedPath{m, t, x, "non-finite state"}};
    }
    s += log_increment(pi, x, y);
    x = y;
    if (t == plan.checkpoints[c]) {
      sums[c * stride + m] = s;
      if (states != nullptr) states[c * stride + m] = x;
      if (++c == plan.checkpoints.size()) break;
    }
  }
  return {};
}

}  // namespace

PathEnsemble simulate(const SimulationPlan& plan, Execution exec) {
  plan.validate();
  PathEnsemble out{plan, {}, {}, {}};
  const std::size_t n_cells = plan.paths * plan.checkpoints.size();
  out.sums.assign(n_cells, 0.0);
  if (plan.record_states) out.states.assign(n_cells, 0.0);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(exec.threads), plan.paths));
  std::vector<std::vector<ExcludedPath>> failures(workers);
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](unsigned w) {
    const std::size_t lo = plan.paths * w / workers;
    const std::size_t hi = plan.paths * (w + 1) / workers;
    try {
      for (std::size_t m = lo; m < hi; ++m) {
        const auto r = run_path(plan, m, out.sums.data(),
                                plan.record_states ? out.states.data() : nullptr);
        if (!r.ok) failures[w].push_back(r.failure);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& block : failures) {
    for (auto& f : block) {
      for (std::size_t c = 0; c < plan.checkpoints.size(); ++c) {
        out.sums[c * plan.paths + f.path_index] = nan;
        if (plan.record_states) out.states[c * plan.paths + f.path_index] = nan;
      }
      out.excluded.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<double> path_increments(const SimulationPlan& plan, std::size_t path_index) {
  plan.validate();
  const MarketModel& model = plan.model;
  NoiseStream stream(plan.seed, path_index);
  std::vector<double> inc;
  inc.reserve(plan.horizon);
  double x = model.x0();
  for (std::size_t t = 1; t <= plan.horizon; ++t) {
    const double eps = model.noise().sample(stream.next());
    const double pi = allocate(plan.strategy, model, x);
    const double y = step(model, x, eps);
    inc.push_back(log_increment(pi, x, y));
    x = y;
  }
  return inc;
}

std::vector<std::size_t> even_checkpoints(std::size_t horizon, std::size_t count) {
  if (horizon < 1 || count < 1) throw InvalidArgument("even_checkpoints: need horizon, count >= 1");
  count = std::min(count, horizon);
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= count; ++i) {
    const std::size_t t = horizon * i / count;
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

}  // namespace aea
