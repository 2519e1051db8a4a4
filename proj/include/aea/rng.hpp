#pragma once

#include <array>
#include <cstdint>

namespace aea {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive independent seeds for sub-tasks.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// Maps 64 random bits onto the open interval (0, 1): midpoints of a
/// 2^-52 lattice, so neither end is reachable after rounding.
inline double bits_to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Inverse of the standard normal CDF, Wichura's AS241 (PPND16).
/// Relative accuracy about 1e-16 on (0, 1).
double normal_quantile(double u);

/// Counter-based uniform stream for one path.  Draw k of path i under a
/// given seed is a pure function of (seed, i, k); each Philox block feeds
/// two consecutive draws.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t path_index)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        path_(path_index) {}

  /// Uniform draw with index k; random access.
  double uniform(std::uint64_t k) const;

  /// Next sequential draw (index 0, 1, 2, ...).
  double next();

  std::uint64_t position() const noexcept { return pos_; }
  std::uint64_t path_index() const noexcept { return path_; }

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t b) const;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t path_;
  std::uint64_t pos_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> cache_{};
};

/// Stream for path `path_index` under `seed`.
inline NoiseStream stream_for_path(std::uint64_t seed, std::uint64_t path_index) {
  return NoiseStream(seed, path_index);
}

}  // namespace aea
