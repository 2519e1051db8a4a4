#include "aea/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aea/error.hpp"
#include "aea/rng.hpp"

namespace aea {

namespace {

constexpr std::size_t kMinBatchLength = 100;
constexpr std::size_t kMinBatches = 20;

void guard_state(double x, double limit, std::size_t t) {
  if (!std::isfinite(x) || std::fabs(x) > limit) {
    throw NonErgodic("state |X| exceeded " + std::to_string(limit) + " at step " +
                     std::to_string(t) + "; input does not look ergodic");
  }
}

}  // namespace

std::size_t default_burn_in(std::size_t length) {
  return std::max<std::size_t>(1000, length / 100);
}

ErgodicReport run_ergodic(const MarketModel& model, const Strategy& strategy,
                          const ErgodicOptions& options) {
  const std::size_t burn = options.burn_in.value_or(default_burn_in(options.length));
  if (options.length < 10 * burn) {
    throw InvalidArgument("ergodic: length must be at least 10 * burn_in");
  }
  const std::size_t n = options.length - burn;
  std::size_t batch = options.batch_length.value_or(
      std::max<std::size_t>(kMinBatchLength, n / 100));
  if (batch < 1) batch = 1;

  ErgodicReport rep;
  rep.burn_in = burn;
  rep.batch_length = batch;
  rep.samples = n;

  const NoiseSpec& noise = model.noise();
  NoiseStream stream = stream_for_path(options.seed, 0);
  double x = model.x0();
  for (std::size_t t = 1; t <= burn; ++t) {
    x = step(model, x, noise.sample(stream.next()));
    guard_state(x, options.max_abs_state, t);
  }

  // Welford over all f values; batch sums over complete batches.
  double mean = 0.0, m2 = 0.0;
  double batch_sum = 0.0;
  std::size_t in_batch = 0;
  std::vector<double> batch_means;
  batch_means.reserve(n / batch + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    const double eps = noise.sample(stream.next());
    const double pi = allocate(strategy, model, x);
    const double y = step(model, x, eps);
    guard_state(y, options.max_abs_state, burn + i);
    const double f = log_increment(pi, x, y);
    x = y;

    const double delta = f - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (f - mean);

    batch_sum += f;
    if (++in_batch == batch) {
      batch_means.push_back(batch_sum / static_cast<double>(batch));
      batch_sum = 0.0;
      in_batch = 0;
    }
  }

  rep.nu_f_hat = mean;
  rep.f_sample_variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  rep.constant_f_flag = rep.f_sample_variance < 1e-12;
  rep.n_batches = batch_means.size();

  if (rep.n_batches >= 2) {
    double bm = 0.0;
    for (double b : batch_means) bm += b;
    bm /= static_cast<double>(rep.n_batches);
    double var = 0.0;
    for (double b : batch_means) var += (b - bm) * (b - bm);
    var /= static_cast<double>(rep.n_batches - 1);
    rep.nu_f_stderr = std::sqrt(var / static_cast<double>(rep.n_batches));
    if (rep.n_batches >= kMinBatches && batch >= kMinBatchLength) {
      rep.sigma2_f_hat = std::max(0.0, var * static_cast<double>(batch));
    }
  } else {
    rep.nu_f_stderr = std::sqrt(rep.f_sample_variance / static_cast<double>(n));
  }
  if (rep.constant_f_flag) {
    rep.nu_f_stderr = 0.0;
    if (rep.sigma2_f_hat) rep.sigma2_f_hat = 0.0;
  }
  return rep;
}

MeanEstimate estimate_nu_f(const MarketModel& model, const Strategy& strategy,
                           std::size_t length, std::size_t burn_in, std::uint64_t seed) {
  ErgodicOptions opt;
  opt.length = length;
  opt.burn_in = burn_in;
  opt.seed = seed;
  const auto rep = run_ergodic(model, strategy, opt);
  return {rep.nu_f_hat, rep.nu_f_stderr};
}

double estimate_sigma2_f(const MarketModel& model, const Strategy& strategy,
                         std::size_t length, std::size_t burn_in,
                         std::size_t batch_length, std::uint64_t seed) {
  if (batch_length < kMinBatchLength) {
    throw InvalidArgument("sigma2: batch_length must be >= 100");
  }
  if (length < burn_in || (length - burn_in) / batch_length < kMinBatches) {
    throw InvalidArgument("sigma2: fewer than 20 batches after burn-in");
  }
  ErgodicOptions opt;
  opt.length = length;
  opt.burn_in = burn_in;
  opt.batch_length = batch_length;
  opt.seed = seed;
  const auto rep = run_ergodic(model, strategy, opt);
  return rep.sigma2_f_hat.value_or(0.0);
}

std::vector<double> InvariantHistogram::x_marginal() const {
  std::vector<double> out(nx(), 0.0);
  for (std::size_t i = 0; i < nx(); ++i) {
    for (std::size_t j = 0; j < ny(); ++j) out[i] += at(i, j);
  }
  return out;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 1) throw InvalidArgument("uniform_edges: need lo < hi and n >= 1");
  std::vector<double> e(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  }
  return e;
}

InvariantHistogram empirical_invariant_histogram(const MarketModel& model,
                                                 std::size_t length, std::size_t burn_in,
                                                 std::vector<double> x_edges,
                                                 std::vector<double> y_edges,
                                                 std::uint64_t seed, double max_abs_state) {
  if (x_edges.size() < 2 || y_edges.size() < 2) {
    throw InvalidArgument("histogram: need at least one bin per axis");
  }
  if (!std::is_sorted(x_edges.begin(), x_edges.end()) ||
      !std::is_sorted(y_edges.begin(), y_edges.end())) {
    throw InvalidArgument("histogram: edges must be increasing");
  }
  if (length <= burn_in) throw InvalidArgument("histogram: length must exceed burn_in");

  InvariantHistogram h;
  h.x_edges = std::move(x_edges);
  h.y_edges = std::move(y_edges);
  std::vector<std::size_t> counts(h.nx() * h.ny(), 0);

  auto bin = [](const std::vector<double>& edges, double v) -> std::ptrdiff_t {
    if (v < edges.front() || v >= edges.back()) return -1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
  };

  const NoiseSpec& noise = model.noise();
  NoiseStream stream = stream_for_path(seed, 0);
  double x = model.x0();
  std::size_t inside = 0;
  std::size_t total = 0;
  for (std::size_t t = 1; t <= length; ++t) {
    const double y = step(model, x, noise.sample(stream.next()));
    guard_state(y, max_abs_state, t);
    if (t > burn_in) {
      ++total;
      const auto ix = bin(h.x_edges, x);
      const auto iy = bin(h.y_edges, y);
      if (ix >= 0 && iy >= 0) {
        ++counts[static_cast<std::size_t>(ix) * h.ny() + static_cast<std::size_t>(iy)];
        ++inside;
      }
    }
    x = y;
  }

  h.samples = inside;
  h.outside_fraction = 1.0 - static_cast<double>(inside) / static_cast<double>(total);
  h.mass.assign(counts.size(), 0.0);
  if (inside > 0) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      h.mass[k] = static_cast<double>(counts[k]) / static_cast<double>(inside);
    }
  }
  return h;
}

}  // namespace aea
