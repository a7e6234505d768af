#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fedban/bandit_env.hpp"
#include "fedban/dp.hpp"
#include "fedban/fed_master.hpp"  // SimResult
#include "fedban/mixing.hpp"

namespace fedban {

// Gossip-style UCB index for one (agent, arm) pair at time t:
//
//   I = s_hat / n_hat
//     + sigma * sqrt( 2 rho (n_hat + c_i) / (M n_hat) * ln t / n_hat )
//     + h(n_hat) / ...                         (privacy certificate at n_hat)
//
// n_hat and s_hat are the agent's consensus estimates of the network-wide
// pull count (per agent) and private reward sum for the arm; c_i is the
// agent's spectral excess-variance constant and sigma the known reward
// standard deviation. h is the same error certificate the master-worker
// index uses, evaluated at the consensus count.
double dec_ucb_index(double s_hat, double n_hat, double t, double rho, double sigma,
                     double c_i, int agents, const PrivacyParams& privacy);

// One synchronous gossip exchange: for every arm row,
//   n_hat <- P (n_hat + xi_prev)         (xi = last step's pull indicators)
//   s_hat <- P  s_hat                    (reward info enters via local deltas)
// Rows are arms, columns agents.
void consensus_update(Matrix& n_hat, Matrix& s_hat, const Matrix& xi_prev,
                      const MixingMatrix& mixing);

struct DecentralizedConfig {
  std::int64_t horizon = 0;
  std::vector<ArmModel> arm_models;
  PrivacyParams privacy;
  ClampRange clamp{0.0, 1.0};
  double rho = 2.0;    // exploration exponent, > 1
  double sigma = 1.0;  // known per-reward standard deviation used by the index
  std::uint64_t run_seed = 0;
  bool record_actions = false;

  // Tracks a noise-free shadow of the gossip ledgers (testing aid).
  bool track_shadow = false;
  // Verifies the consensus-count band |n_hat - n_avg| <= c0 each step and
  // counts violations instead of failing the run.
  bool debug_checks = false;

  // Test seam: when set, overrides the policy's arm choice; returning a
  // negative value falls through to the normal policy for that step.
  std::function<int(int agent, std::int64_t t)> forced_action;
};

// Fully decentralized federated UCB over a gossip network.
//
// Steps 1..K are forced exploration (arm t-1 everywhere). From step 2 on,
// every step starts with one consensus exchange; the pull indicators and
// reward information of step t-1 therefore reach neighbours at step t.
// After pulling an arm, an agent reads its private mechanism's total for
// that arm and adds the increment since its previous read to its own s_hat
// entry, so privacy noise enters the gossip exactly once per release.
class DecentralizedSim {
 public:
  DecentralizedSim(DecentralizedConfig cfg, const MixingMatrix& mixing);

  void step();
  SimResult run();

  std::int64_t now() const { return t_; }
  const BanditEnv& env() const { return env_; }
  const MixingMatrix& mixing() const { return mixing_; }

  double n_hat(int agent, int arm) const { return n_hat_(arm, agent); }
  double s_hat(int agent, int arm) const { return s_hat_(arm, agent); }

  // Gossip mean of the noise-free shadow ledger (needs track_shadow).
  double shadow_mean(int agent, int arm) const;

  std::int64_t count_band_violations() const { return band_violations_; }
  double worst_band_excess() const { return worst_band_excess_; }

 private:
  int choose_action(int agent, std::int64_t t) const;

  DecentralizedConfig cfg_;
  MixingMatrix mixing_;
  BanditEnv env_;
  std::vector<Rng> reward_rngs_;
  std::vector<std::vector<HybridMechanism>> mechs_;  // [agent][arm]
  std::vector<std::vector<double>> last_release_;    // previous private_sum read

  // Consensus ledgers, one row per arm, one column per agent.
  Matrix n_hat_, s_hat_, xi_prev_;
  Matrix shadow_y_, r_prev_;             // noise-free shadow (optional)
  std::vector<std::int64_t> pull_totals_;  // network-wide pulls per arm

  std::int64_t t_ = 0;
  std::int64_t band_violations_ = 0;
  double worst_band_excess_ = 0.0;
  SimResult result_;
};

SimResult run_decentralized(const DecentralizedConfig& cfg, const MixingMatrix& mixing);

}  // namespace fedban
