#pragma once

#include <cstdint>

#include "fedban/rng.hpp"

namespace fedban::streams {

// Named substream derivation. Every consumer of randomness in a run gets its
// own counter-based stream keyed by (run seed, domain tag, identity), so
// adding or removing one consumer never perturbs the draws seen by another.
// Tests rely on these exact derivations to replay a simulation's reward
// sequence independently.

inline constexpr std::uint64_t kRepeatDomain = 0x7265706561743030ULL;
inline constexpr std::uint64_t kRewardDomain = 0x7265776172643030ULL;
inline constexpr std::uint64_t kNoiseDomain = 0x6e6f697365303030ULL;

// Seed for repeat r of an experiment.
inline std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat) {
  return derive_seed(derive_seed(master_seed, kRepeatDomain), static_cast<std::uint64_t>(repeat));
}

// Reward stream for one agent within a run.
inline std::uint64_t reward_stream(std::uint64_t run_seed, int agent) {
  return derive_seed(derive_seed(run_seed, kRewardDomain), static_cast<std::uint64_t>(agent));
}

// Privacy-noise stream for one (agent, arm) mechanism within a run.
inline std::uint64_t noise_stream(std::uint64_t run_seed, int agent, int arm) {
  const std::uint64_t a = derive_seed(derive_seed(run_seed, kNoiseDomain),
                                      static_cast<std::uint64_t>(agent));
  return derive_seed(a, static_cast<std::uint64_t>(arm));
}

}  // namespace fedban::streams
