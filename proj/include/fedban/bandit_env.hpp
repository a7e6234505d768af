#pragma once

#include <cstdint>
#include <vector>

#include "fedban/dp.hpp"
#include "fedban/errors.hpp"
#include "fedban/rng.hpp"

namespace fedban {

// One arm's reward law. Draw consumption per sample is fixed by kind
// (bernoulli and uniform01 take one uniform, gaussian takes two), so reward
// streams can be replayed independently of policy decisions.
struct ArmModel {
  enum class Kind { bernoulli, uniform01, gaussian };

  Kind kind = Kind::bernoulli;
  double mu = 0.5;
  double sigma2 = 0.0;  // gaussian only

  double stddev() const;
  double sample(Rng& rng) const;
  void validate() const;  // throws ConfigError
};

// Shared multi-armed environment for M agents. Arms are stored best-first
// (descending mean); pseudo-regret is accounted incrementally as the
// suboptimality gap of every pull, never from realized rewards.
class BanditEnv {
 public:
  BanditEnv(int agents, std::vector<ArmModel> arms);

  int agents() const { return agents_; }
  int arms() const { return static_cast<int>(arms_.size()); }

  // Draws a reward for (agent, arm), charges the gap to the regret account
  // and bumps the pull counter. Throws std::out_of_range on bad ids.
  double pull(int agent, int arm, Rng& rng);

  // Appends the current cumulative regret to the per-step trace; call once
  // per timestep after all agents have acted.
  void record_step();

  double cumulative_regret() const { return regret_; }
  const std::vector<double>& regret_trace() const { return trace_; }

  std::int64_t pull_count(int agent, int arm) const;
  std::int64_t arm_pulls(int arm) const;  // summed over agents
  std::vector<std::int64_t> action_histogram() const;

  const ArmModel& arm(int j) const { return arms_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& gaps() const { return gaps_; }
  double delta_min() const { return delta_min_; }
  double delta_max() const { return delta_max_; }
  double best_mean() const { return arms_.front().mu; }

 private:
  void check_ids(int agent, int arm) const;

  int agents_ = 0;
  std::vector<ArmModel> arms_;
  std::vector<double> gaps_;
  double delta_min_ = 0.0;
  double delta_max_ = 0.0;
  double regret_ = 0.0;
  std::vector<double> trace_;
  std::vector<std::int64_t> pulls_;  // agents x arms, row-major
};

// Default clamp window for a given arm set: the unit interval for bounded
// kinds, a 3-sigma envelope around the extreme means when any arm is
// gaussian. One shared window for all arms keeps private means comparable
// across arms.
ClampRange default_clamp(const std::vector<ArmModel>& arms);

}  // namespace fedban
