#pragma once

// Seedable deterministic randomness. Every consumer derives an independent
// substream from (seed, stream index) with SplitMix64 and draws from a
// std::mt19937_64 seeded with it; integer and real mappings are done here
// rather than through <random> distributions so results do not depend on
// the standard library implementation.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ftfir {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), unbiased.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - n + 1) % n;
    for (;;) {
      std::uint64_t x = next();
      if (x >= limit) return x % n;
    }
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ftfir
