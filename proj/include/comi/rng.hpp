#pragma once

// Deterministic pseudo-randomness for every experiment in the repository.
//
// One generator is used everywhere: SplitMix64 (Steele, Lea & Flood 2014).
// Its state advances by the 64-bit golden-ratio constant and every output is
// a finalizer mix of the state, so the k-th output of a stream is a pure
// function of (seed, k). Consequences relied on elsewhere:
//   - streams for parallel or repeated trials are derived as
//     seed = base_seed + trial_index; distinct derived streams never share a
//     raw state because state collisions would need k*GAMMA == 1 (mod 2^64),
//   - discard() is O(1), which gives random access into a stream.
// Normal deviates use the Box-Muller transform on a pair of 53-bit uniforms;
// the sine branch is discarded so every normal consumes exactly two words and
// stream positions stay index-addressable. Nothing depends on std::<random>
// distribution internals, so sequences reproduce bit-for-bit across runs.

#include <cstdint>
#include <cmath>
#include <numbers>

namespace comi {

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += kSplitMix64Gamma;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static Rng stream(std::uint64_t base_seed, std::uint64_t trial_index) noexcept {
    return Rng(base_seed + trial_index);
  }

  std::uint64_t next_u64() noexcept { return splitmix64_next(state_); }

  // Skip n outputs in O(1); the state walk is an arithmetic progression.
  void discard(std::uint64_t n) noexcept { state_ += n * kSplitMix64Gamma; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal; consumes exactly two words (see header comment).
  double normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 2.0 * std::numbers::pi * uniform();
    return r * std::cos(t);
  }

  // Standard exponential (mean one); consumes one word.
  double exponential() noexcept { return -std::log(uniform_pos()); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace comi
