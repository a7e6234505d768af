#pragma once

#include <cstdint>
#include <vector>

#include "fedban/bandit_env.hpp"
#include "fedban/dp.hpp"

namespace fedban {

// Private UCB index for one (agent, arm) pair at global time t:
//
//   I = private_mean + sqrt(2 ln t / n) + h(n)
//
// where n is the number of local pulls of the arm and h is the privacy error
// certificate. With noise disabled h(n) = 0 and the index reduces to
// ordinary UCB1 on the private (= exact) mean.
double ucb_private_index(const PrivateSumReport& report, double t);

// Master-side aggregation: elementwise mean over agents of the per-arm index
// vectors. Throws NumericalFault if any input index is not finite.
std::vector<double> central_average(const std::vector<std::vector<double>>& per_agent);

struct MasterWorkerConfig {
  int agents = 1;
  std::int64_t horizon = 0;
  std::vector<ArmModel> arm_models;
  PrivacyParams privacy;
  ClampRange clamp{0.0, 1.0};
  std::uint64_t run_seed = 0;
  bool record_actions = false;
};

// Everything a run leaves behind.
struct SimResult {
  std::vector<double> regret;                // cumulative pseudo-regret per step
  std::vector<std::int64_t> action_histogram;  // pulls per arm, all agents
  std::int64_t clamp_events = 0;
  std::int64_t comm_rounds = 0;   // master contacts (master-worker only)
  std::int64_t arm_switches = 0;  // committed-arm changes after init
  std::vector<std::vector<int>> actions;  // [step][agent] when recorded
};

// Master-worker federated UCB with doubling communication epochs.
//
// Steps 1..K are forced exploration: every agent plays arm t-1 in lockstep.
// Afterwards all agents replay a committed arm; a shared counter eta
// advances by one every step (including the forced steps) and whenever it
// hits a power of two the workers push their private indices to the master,
// which broadcasts the average and the argmax. If the argmax changes the
// committed arm, eta restarts at 1 (so the next check comes quickly);
// otherwise the epoch between checks keeps doubling. Indices are only
// computed at communication steps, never during replay.
class MasterWorkerSim {
 public:
  explicit MasterWorkerSim(MasterWorkerConfig cfg);

  void step();
  SimResult run();  // steps through t = 1..horizon

  std::int64_t now() const { return t_; }
  std::int64_t eta() const { return eta_; }
  int committed_arm() const { return committed_; }
  const BanditEnv& env() const { return env_; }

 private:
  MasterWorkerConfig cfg_;
  BanditEnv env_;
  std::vector<Rng> reward_rngs_;                      // one per agent
  std::vector<std::vector<HybridMechanism>> mechs_;   // [agent][arm]
  std::int64_t t_ = 0;
  std::int64_t eta_ = 1;
  int committed_ = -1;
  SimResult result_;
};

SimResult run_master_worker(const MasterWorkerConfig& cfg);

}  // namespace fedban
