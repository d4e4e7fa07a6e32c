#pragma once

#include <cmath>
#include <cstdint>

namespace photonwalk {

// SplitMix64 generator (Steele, Lea & Flood). Every randomized routine in the
// library draws from this generator so that results are a pure function of
// (inputs, seed) and identical across platforms; the standard <random>
// distributions are implementation-defined and are not used.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller.
  double next_normal() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent child seed for stream `stream` of a root seed.
// Used for per-event, per-scan and per-realization streams so that parallel
// or reordered evaluation cannot change any result.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  SplitMix64 g(root ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
  return g.next_u64();
}

// Poisson draw: Knuth inversion for small means, rounded normal
// approximation above 50 (plenty for count-noise modelling).
inline std::int64_t sample_poisson(SplitMix64& g, double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 50.0) {
    const double limit = std::exp(-mean);
    double product = g.next_double();
    std::int64_t count = 0;
    while (product > limit) {
      product *= g.next_double();
      ++count;
    }
    return count;
  }
  const double value = mean + std::sqrt(mean) * g.next_normal();
  return value > 0.0 ? static_cast<std::int64_t>(std::llround(value)) : 0;
}

}  // namespace photonwalk
