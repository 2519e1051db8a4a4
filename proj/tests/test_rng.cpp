#include <doctest.h>

#include <cmath>
#include <vector>

#include "aea/rng.hpp"
#include "oracles.hpp"

using namespace aea;

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal quantile inverts the erfc-based cdf") {
  CHECK(normal_quantile(0.5) == 0.0);
  for (double u : {1e-300, 1e-20, 1e-8, 1e-3, 0.02425, 0.1, 0.3, 0.49, 0.51, 0.7, 0.9,
                   0.97575, 0.999}) {
    const double z = normal_quantile(u);
    CHECK(oracle::normal_cdf(z) == doctest::Approx(u).epsilon(1e-13));
    if (u >= 1e-3) CHECK(normal_quantile(1.0 - u) == doctest::Approx(-z).epsilon(1e-9));
  }
}

TEST_CASE("unit mapping stays inside the open interval") {
  CHECK(bits_to_unit(0) > 0.0);
  CHECK(bits_to_unit(~std::uint64_t{0}) < 1.0);
  CHECK(std::isfinite(normal_quantile(bits_to_unit(0))));
  CHECK(std::isfinite(normal_quantile(bits_to_unit(~std::uint64_t{0}))));
}

TEST_CASE("streams are pure functions of (seed, path, index)") {
  const auto a = stream_for_path(7, 3);
  const auto b = stream_for_path(7, 3);
  for (std::uint64_t k : {0ull, 1ull, 2ull, 17ull, 123456789ull}) {
    CHECK(a.uniform(k) == b.uniform(k));
  }

  auto seq = stream_for_path(7, 3);
  for (std::uint64_t k = 0; k < 9; ++k) CHECK(seq.next() == a.uniform(k));
  CHECK(seq.position() == 9);

  CHECK(stream_for_path(7, 0).uniform(0) != stream_for_path(8, 0).uniform(0));
  CHECK(stream_for_path(7, 0).uniform(0) != stream_for_path(7, 1).uniform(0));
}

TEST_CASE("neighbouring paths are uncorrelated") {
  auto s0 = stream_for_path(2024, 0);
  auto s1 = stream_for_path(2024, 1);
  const int n = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    const double x = normal_quantile(s0.next());
    const double y = normal_quantile(s1.next());
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double rho = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(rho) < 0.05);
}

TEST_CASE("uniform draws look uniform") {
  auto s = stream_for_path(1, 0);
  std::vector<int> bins(10, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++bins[static_cast<int>(s.next() * 10)];
  double chi2 = 0;
  for (int c : bins) chi2 += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
  CHECK(chi2 < 27.9);  // 99.9% point of chi^2 with 9 dof
}

TEST_CASE("seed mixing separates tags") {
  CHECK(mix_seed(1, 1) != mix_seed(1, 2));
  CHECK(mix_seed(1, 1) != mix_seed(2, 1));
  CHECK(mix_seed(5, 9) == mix_seed(5, 9));
}
