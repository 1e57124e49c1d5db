#pragma once

#include <cstdint>
#include <random>

namespace edgectl {

/// SplitMix64 finalizer; used to decorrelate per-task seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Reproducible random stream. The engine sequence is fixed by the
/// standard; the variate transforms are spelled out here so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent stream for sweep task `index` (seeded from base ^ index).
  static Rng for_task(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(base_seed ^ index);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal via Box-Muller (one variate per call, the sine branch
  /// is discarded to keep the stream position simple).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace edgectl
