#pragma once

#include <cstdint>
#include <random>

namespace stochgm {

inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the substream (master, index, lane). Depends only on its
/// arguments, so realization i draws the same numbers no matter which
/// thread produces it.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index,
                                       std::uint64_t lane = 0) noexcept {
  return mix64(mix64(mix64(master) ^ index) ^ (lane * 0xD6E8FEB86659FD93ULL));
}

class NormalStream {
 public:
  NormalStream(std::uint64_t master, std::uint64_t index, std::uint64_t lane = 0)
      : engine_(substream_seed(master, index, lane)) {}

  double operator()() { return dist_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace stochgm
