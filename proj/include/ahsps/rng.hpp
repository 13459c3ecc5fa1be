#pragma once

#include <cmath>
#include <cstdint>

namespace ahsps {

// Counter-based random stream. Every draw for trigger index k is derived
// from mix(seed, k), so disjoint index ranges can be generated in any
// order, or on any number of threads, and still reproduce the serial
// stream bit for bit. That property is the simulator's determinism
// contract; do not replace this with a shared sequential engine.
//
// The generator is the SplitMix64 sequence (Steele/Lea/Flood mixing
// constants) started at a per-(seed, index) offset.
class TriggerRng {
 public:
  TriggerRng(std::uint64_t seed, std::uint64_t index)
      : state_(mix(seed + kGamma * (index + 1))) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 significant bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// One biased coin with click probability p. Always consumes one draw.
  bool next_bernoulli(double p) { return next_unit() < p; }

  /// Exponential inter-arrival time in seconds for a Poisson process.
  double next_exponential(double rate_hz) {
    // next_unit() < 1 strictly, so the argument of log1p stays > -1.
    return -std::log1p(-next_unit()) / rate_hz;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace ahsps
