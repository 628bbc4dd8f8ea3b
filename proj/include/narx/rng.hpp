#pragma once

#include <cstdint>
#include <random>

namespace narx {

/// Stateless 64-bit mixer (splitmix64).  Used to turn a base seed plus a run
/// index into well-separated stream seeds, so experiment runs can execute in
/// any order (or in parallel) and still be replayed individually.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for run `run_index` of an experiment with base seed `base_seed`.
[[nodiscard]] constexpr std::uint64_t run_seed(std::uint64_t base_seed,
                                               std::uint64_t run_index) noexcept {
  return splitmix64(base_seed + 0x632be59bd9b4e019ULL * (run_index + 1));
}

/// The single RNG type used throughout; one instance per search run.
using Rng = std::mt19937_64;

[[nodiscard]] inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace narx
