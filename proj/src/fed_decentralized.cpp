#include "fedban/fed_decentralized.hpp"

#include <cmath>
#include <limits>

#include "fedban/streams.hpp"

namespace fedban {

double dec_ucb_index(double s_hat, double n_hat, double t, double rho, double sigma,
                     double c_i, int agents, const PrivacyParams& privacy) {
  if (!(n_hat > 0.0)) throw DomainError("dec index: consensus count must be positive");
  if (!(t >= 1.0)) throw DomainError("dec index: t must be >= 1");
  const double m = static_cast<double>(agents);
  const double mean = s_hat / n_hat;
  const double explore =
      sigma * std::sqrt(2.0 * rho * (n_hat + c_i) / (m * n_hat) * std::log(t) / n_hat);
  const double cert = privacy.noise_enabled()
                          ? error_certificate(std::max(n_hat, 1.0), privacy.epsilon,
                                              privacy.delta)
                          : 0.0;
  return mean + explore + cert;
}

void consensus_update(Matrix& n_hat, Matrix& s_hat, const Matrix& xi_prev,
                      const MixingMatrix& mixing) {
  const int k = n_hat.rows();
  const int m = n_hat.cols();
  const Matrix& p = mixing.p();
  std::vector<double> buf(static_cast<std::size_t>(m));
  for (int j = 0; j < k; ++j) {
    double* nrow = n_hat.row(j);
    const double* xrow = xi_prev.row(j);
    for (int i = 0; i < m; ++i) buf[static_cast<std::size_t>(i)] = nrow[i] + xrow[i];
    for (int i = 0; i < m; ++i) {
      const double* prow = p.row(i);
      double acc = 0.0;
      for (int c = 0; c < m; ++c) acc += prow[c] * buf[static_cast<std::size_t>(c)];
      nrow[i] = acc;
    }
    double* srow = s_hat.row(j);
    for (int i = 0; i < m; ++i) buf[static_cast<std::size_t>(i)] = srow[i];
    for (int i = 0; i < m; ++i) {
      const double* prow = p.row(i);
      double acc = 0.0;
      for (int c = 0; c < m; ++c) acc += prow[c] * buf[static_cast<std::size_t>(c)];
      srow[i] = acc;
    }
  }
}

DecentralizedSim::DecentralizedSim(DecentralizedConfig cfg, const MixingMatrix& mixing)
    : cfg_(std::move(cfg)), mixing_(mixing), env_(mixing.size(), cfg_.arm_models) {
  cfg_.privacy.validate();
  cfg_.clamp.validate();
  if (cfg_.horizon <= env_.arms()) {
    throw ConfigError("decentralized: horizon must exceed the number of arms");
  }
  if (!(cfg_.rho > 1.0)) throw ConfigError("decentralized: rho must exceed 1");
  if (!std::isfinite(cfg_.sigma) || !(cfg_.sigma > 0.0)) {
    throw ConfigError("decentralized: sigma must be positive");
  }

  const int m = env_.agents();
  const int k = env_.arms();
  reward_rngs_.reserve(static_cast<std::size_t>(m));
  mechs_.resize(static_cast<std::size_t>(m));
  last_release_.assign(static_cast<std::size_t>(m),
                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < m; ++i) {
    reward_rngs_.emplace_back(streams::reward_stream(cfg_.run_seed, i));
    auto& row = mechs_[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      row.emplace_back(cfg_.privacy, cfg_.clamp, streams::noise_stream(cfg_.run_seed, i, j));
    }
  }

  n_hat_ = Matrix(k, m, 0.0);
  s_hat_ = Matrix(k, m, 0.0);
  xi_prev_ = Matrix(k, m, 0.0);
  if (cfg_.track_shadow) {
    shadow_y_ = Matrix(k, m, 0.0);
    r_prev_ = Matrix(k, m, 0.0);
  }
  pull_totals_.assign(static_cast<std::size_t>(k), 0);
}

int DecentralizedSim::choose_action(int agent, std::int64_t t) const {
  const int k = env_.arms();
  // An arm whose consensus count has not effectively reached one pull must
  // be explored before its index is meaningful. After the forced-exploration
  // phase every count is exactly 1, so the 0.5 threshold only fires when a
  // forced-action schedule has starved an arm.
  for (int j = 0; j < k; ++j) {
    if (n_hat_(j, agent) < 0.5) return j;
  }
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    const double v = dec_ucb_index(s_hat_(j, agent), n_hat_(j, agent),
                                   static_cast<double>(t), cfg_.rho, cfg_.sigma,
                                   mixing_.c_i()[static_cast<std::size_t>(agent)],
                                   env_.agents(), cfg_.privacy);
    if (!std::isfinite(v)) {
      throw NumericalFault("decentralized: non-finite index");
    }
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  return best;
}

void DecentralizedSim::step() {
  const std::int64_t t = ++t_;
  const int m = env_.agents();
  const int k = env_.arms();

  if (t >= 2) {
    consensus_update(n_hat_, s_hat_, xi_prev_, mixing_);
    if (cfg_.track_shadow) {
      // shadow_y <- P (shadow_y + r_prev): reuse the count path of the
      // exchange by treating r_prev as the indicator term.
      Matrix dummy(k, m, 0.0);
      consensus_update(shadow_y_, dummy, r_prev_, mixing_);
      r_prev_.zero();
    }
    xi_prev_.zero();

    if (cfg_.debug_checks) {
      // Consensus counts must stay within c0 of the network average of
      // pulls released so far (everything up to step t-1).
      const double c0 = mixing_.c0();
      for (int j = 0; j < k; ++j) {
        const double avg = static_cast<double>(pull_totals_[static_cast<std::size_t>(j)]) /
                           static_cast<double>(m);
        for (int i = 0; i < m; ++i) {
          const double dev = std::abs(n_hat_(j, i) - avg);
          if (dev > c0 + 1e-9) {
            ++band_violations_;
            worst_band_excess_ = std::max(worst_band_excess_, dev - c0);
          }
        }
      }
    }
  }

  std::vector<int> actions(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    int a = -1;
    if (cfg_.forced_action) a = cfg_.forced_action(i, t);
    if (a < 0) a = t <= k ? static_cast<int>(t - 1) : choose_action(i, t);
    actions[static_cast<std::size_t>(i)] = a;
  }

  for (int i = 0; i < m; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    const double r = env_.pull(i, a, reward_rngs_[static_cast<std::size_t>(i)]);
    auto& mech = mechs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    mech.insert(r);

    // Release the private increment into the local gossip ledger. The
    // mechanism's total moves by (new reward + fresh noise terms); gossiping
    // the increment keeps the local column equal to the full private sum.
    const double released = mech.private_sum();
    double& prev = last_release_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    s_hat_(a, i) += released - prev;
    prev = released;

    xi_prev_(a, i) += 1.0;
    ++pull_totals_[static_cast<std::size_t>(a)];
    if (cfg_.track_shadow) {
      r_prev_(a, i) += cfg_.clamp.clamp(r);
    }
  }

  env_.record_step();
  if (cfg_.record_actions) result_.actions.push_back(std::move(actions));
}

double DecentralizedSim::shadow_mean(int agent, int arm) const {
  if (!cfg_.track_shadow) throw DomainError("shadow_mean: shadow tracking is off");
  return shadow_y_(arm, agent) / n_hat_(arm, agent);
}

SimResult DecentralizedSim::run() {
  while (t_ < cfg_.horizon) step();
  result_.regret = env_.regret_trace();
  result_.action_histogram = env_.action_histogram();
  result_.clamp_events = 0;
  for (const auto& row : mechs_) {
    for (const auto& mech : row) result_.clamp_events += mech.clamp_events();
  }
  return result_;
}

SimResult run_decentralized(const DecentralizedConfig& cfg, const MixingMatrix& mixing) {
  return DecentralizedSim(cfg, mixing).run();
}

}  // namespace fedban
