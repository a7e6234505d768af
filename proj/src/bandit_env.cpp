#include "fedban/bandit_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fedban {

double ArmModel::stddev() const {
  switch (kind) {
    case Kind::bernoulli: return std::sqrt(mu * (1.0 - mu));
    case Kind::uniform01: return std::sqrt(1.0 / 12.0);
    case Kind::gaussian: return std::sqrt(sigma2);
  }
  return 0.0;
}

double ArmModel::sample(Rng& rng) const {
  switch (kind) {
    case Kind::bernoulli: return rng.next_unit() < mu ? 1.0 : 0.0;
    case Kind::uniform01: return mu - 0.5 + rng.next_unit();
    case Kind::gaussian: return rng.next_gaussian(mu, std::sqrt(sigma2));
  }
  return 0.0;
}

void ArmModel::validate() const {
  if (!std::isfinite(mu)) throw ConfigError("arm: mean must be finite");
  switch (kind) {
    case Kind::bernoulli:
      if (mu < 0.0 || mu > 1.0) throw ConfigError("arm: bernoulli mean must lie in [0, 1]");
      break;
    case Kind::uniform01:
      break;
    case Kind::gaussian:
      if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) {
        throw ConfigError("arm: gaussian variance must be positive");
      }
      break;
  }
}

BanditEnv::BanditEnv(int agents, std::vector<ArmModel> arms)
    : agents_(agents), arms_(std::move(arms)) {
  if (agents_ < 1) throw ConfigError("environment: need at least one agent");
  if (arms_.size() < 2) throw ConfigError("environment: need at least two arms");
  for (const auto& a : arms_) a.validate();

  std::stable_sort(arms_.begin(), arms_.end(),
                   [](const ArmModel& a, const ArmModel& b) { return a.mu > b.mu; });

  const double best = arms_.front().mu;
  gaps_.resize(arms_.size());
  for (std::size_t j = 0; j < arms_.size(); ++j) gaps_[j] = best - arms_[j].mu;
  delta_min_ = gaps_[1];
  delta_max_ = gaps_.back();
  if (!(delta_min_ > 0.0)) {
    throw ConfigError("environment: best arm must be unique (smallest gap is 0)");
  }

  pulls_.assign(static_cast<std::size_t>(agents_) * arms_.size(), 0);
}

void BanditEnv::check_ids(int agent, int arm) const {
  if (agent < 0 || agent >= agents_) {
    throw std::out_of_range("environment: agent id " + std::to_string(agent));
  }
  if (arm < 0 || arm >= arms()) {
    throw std::out_of_range("environment: arm id " + std::to_string(arm));
  }
}

double BanditEnv::pull(int agent, int arm, Rng& rng) {
  check_ids(agent, arm);
  ++pulls_[static_cast<std::size_t>(agent) * arms_.size() + static_cast<std::size_t>(arm)];
  regret_ += gaps_[static_cast<std::size_t>(arm)];
  return arms_[static_cast<std::size_t>(arm)].sample(rng);
}

void BanditEnv::record_step() { trace_.push_back(regret_); }

std::int64_t BanditEnv::pull_count(int agent, int arm) const {
  check_ids(agent, arm);
  return pulls_[static_cast<std::size_t>(agent) * arms_.size() + static_cast<std::size_t>(arm)];
}

std::int64_t BanditEnv::arm_pulls(int arm) const {
  check_ids(0, arm);
  std::int64_t s = 0;
  for (int i = 0; i < agents_; ++i) {
    s += pulls_[static_cast<std::size_t>(i) * arms_.size() + static_cast<std::size_t>(arm)];
  }
  return s;
}

std::vector<std::int64_t> BanditEnv::action_histogram() const {
  std::vector<std::int64_t> h(arms_.size(), 0);
  for (int j = 0; j < arms(); ++j) h[static_cast<std::size_t>(j)] = arm_pulls(j);
  return h;
}

ClampRange default_clamp(const std::vector<ArmModel>& arms) {
  bool any_gaussian = false;
  double lo = 0.0, hi = 1.0;
  for (const auto& a : arms) {
    if (a.kind == ArmModel::Kind::gaussian) {
      const double s = a.stddev();
      if (!any_gaussian) {
        lo = a.mu - 3.0 * s;
        hi = a.mu + 3.0 * s;
        any_gaussian = true;
      } else {
        lo = std::min(lo, a.mu - 3.0 * s);
        hi = std::max(hi, a.mu + 3.0 * s);
      }
    }
  }
  if (!any_gaussian) return ClampRange{0.0, 1.0};
  // Mixed arm kinds: widen the envelope to keep bounded arms unclamped too.
  for (const auto& a : arms) {
    if (a.kind != ArmModel::Kind::gaussian) {
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 1.0);
    }
  }
  return ClampRange{lo, hi};
}

}  // namespace fedban
