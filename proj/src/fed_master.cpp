#include "fedban/fed_master.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "fedban/streams.hpp"

namespace fedban {

double ucb_private_index(const PrivateSumReport& report, double t) {
  if (report.n < 1) throw DomainError("ucb index: arm has no pulls yet");
  if (!(t >= 1.0)) throw DomainError("ucb index: t must be >= 1");
  const double n = static_cast<double>(report.n);
  return report.mean + std::sqrt(2.0 * std::log(t) / n) + report.h;
}

std::vector<double> central_average(const std::vector<std::vector<double>>& per_agent) {
  if (per_agent.empty()) throw DomainError("central_average: no agents");
  const std::size_t k = per_agent.front().size();
  std::vector<double> avg(k, 0.0);
  for (const auto& row : per_agent) {
    if (row.size() != k) throw DomainError("central_average: ragged index vectors");
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(row[j])) {
        throw NumericalFault("central_average: non-finite index for arm " + std::to_string(j));
      }
      avg[j] += row[j];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(per_agent.size());
  for (auto& v : avg) v *= inv_m;
  return avg;
}

MasterWorkerSim::MasterWorkerSim(MasterWorkerConfig cfg)
    : cfg_(std::move(cfg)), env_(cfg_.agents, cfg_.arm_models) {
  cfg_.privacy.validate();
  cfg_.clamp.validate();
  if (cfg_.horizon <= env_.arms()) {
    throw ConfigError("master-worker: horizon must exceed the number of arms");
  }
  reward_rngs_.reserve(static_cast<std::size_t>(env_.agents()));
  mechs_.resize(static_cast<std::size_t>(env_.agents()));
  for (int i = 0; i < env_.agents(); ++i) {
    reward_rngs_.emplace_back(streams::reward_stream(cfg_.run_seed, i));
    auto& row = mechs_[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(env_.arms()));
    for (int j = 0; j < env_.arms(); ++j) {
      row.emplace_back(cfg_.privacy, cfg_.clamp, streams::noise_stream(cfg_.run_seed, i, j));
    }
  }
}

void MasterWorkerSim::step() {
  const std::int64_t t = ++t_;
  const int k = env_.arms();
  const int m = env_.agents();

  int action;
  if (t <= k) {
    action = static_cast<int>(t - 1);  // forced exploration, lockstep
  } else {
    if (std::has_single_bit(static_cast<std::uint64_t>(eta_))) {
      // Communication round: every worker reports its index vector, the
      // master averages and broadcasts the argmax (lowest arm id on ties).
      std::vector<std::vector<double>> indices(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        auto& row = indices[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
          row[static_cast<std::size_t>(j)] =
              ucb_private_index(mechs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].report(),
                                static_cast<double>(t));
        }
      }
      const std::vector<double> avg = central_average(indices);
      int best = 0;
      for (int j = 1; j < k; ++j) {
        if (avg[static_cast<std::size_t>(j)] > avg[static_cast<std::size_t>(best)]) best = j;
      }
      ++result_.comm_rounds;
      if (best != committed_) {
        committed_ = best;
        ++result_.arm_switches;
        eta_ = 1;  // restart the doubling schedule; the end-of-step bump makes
                   // it 2, so the master re-checks after a single step
      }
    }
    action = committed_;
  }

  for (int i = 0; i < m; ++i) {
    const double r = env_.pull(i, action, reward_rngs_[static_cast<std::size_t>(i)]);
    mechs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(action)].insert(r);
  }
  if (t == k) committed_ = action;  // leave init replaying the last forced arm
  ++eta_;

  env_.record_step();
  if (cfg_.record_actions) {
    result_.actions.emplace_back(static_cast<std::size_t>(m), action);
  }
}

SimResult MasterWorkerSim::run() {
  while (t_ < cfg_.horizon) step();
  result_.regret = env_.regret_trace();
  result_.action_histogram = env_.action_histogram();
  result_.clamp_events = 0;
  for (const auto& row : mechs_) {
    for (const auto& mech : row) result_.clamp_events += mech.clamp_events();
  }
  return result_;
}

SimResult run_master_worker(const MasterWorkerConfig& cfg) {
  return MasterWorkerSim(cfg).run();
}

}  // namespace fedban
