#pragma once

#include <cmath>
#include <cstdint>

namespace fedban {

// SplitMix64 finalizer. The whole project draws randomness through this one
// function so that simulations are bit-reproducible on any platform; nothing
// here depends on std::random_device or the standard distributions, whose
// output is implementation-defined.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d149bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent child seed from (base, salt). Two mixing rounds keep
// nearby salts (agent 0, 1, 2, ...) statistically unrelated.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return mix64(base + 0x9e3779b97f4a7c15ULL * (mix64(salt) | 1ULL));
}

// Counter-based SplitMix64 stream: the i-th output is a pure function of
// (seed, i), so a stream can be replayed or split without shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d149bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe to feed to log() and to
  // inverse CDFs that blow up at the endpoints.
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller without caching: every call consumes exactly two uniforms, so
  // the draw count per sample is fixed and streams stay aligned across
  // refactors that reorder sampling.
  double next_gaussian(double mean, double stddev) {
    const double u1 = next_open_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * (r * std::cos(two_pi * u2));
  }

 private:
  std::uint64_t state_;
};

}  // namespace fedban
