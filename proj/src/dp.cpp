#include "fedban/dp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace fedban {

double laplace_icdf(double u, double b) {
  if (!std::isfinite(b) || !(b > 0.0)) {
    throw ConfigError("laplace_icdf: scale must be positive and finite");
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("laplace_icdf: u must lie in the open interval (0, 1)");
  }
  const double p = u - 0.5;
  if (p == 0.0) return 0.0;
  // F^{-1}(u) = -b * sgn(p) * ln(1 - 2|p|), via log1p for precision near 0.
  return p > 0.0 ? -b * std::log1p(-2.0 * p) : b * std::log1p(2.0 * p);
}

double sample_laplace(double scale, Rng& rng) {
  return laplace_icdf(rng.next_open_unit(), scale);
}

bool PrivacyParams::noise_enabled() const { return std::isfinite(epsilon); }

void PrivacyParams::validate() const {
  if (std::isnan(epsilon) || !(epsilon > 0.0)) {
    throw DomainError("privacy: epsilon must be positive (or +inf for noise off)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("privacy: delta must lie in (0, 1)");
  }
}

double error_certificate(double n, double epsilon, double delta) {
  if (!(n >= 1.0)) {
    throw DomainError("error_certificate: n must be >= 1");
  }
  if (std::isnan(epsilon) || !(epsilon > 0.0)) {
    throw DomainError("error_certificate: epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("error_certificate: delta must lie in (0, 1)");
  }
  const double ln_n = std::log(n);
  // ln(n)^{3/2} as ln * sqrt(ln); cheaper than pow and exact at n = 1.
  return (1.0 / epsilon) * ln_n * std::sqrt(ln_n) * std::log(1.0 / delta) / n;
}

double ClampRange::clamp(double x) const {
  if (std::isnan(x)) throw DomainError("clamp: reward is NaN");
  return std::min(hi, std::max(lo, x));
}

void ClampRange::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigError("clamp range: need finite lo < hi");
  }
}

HybridMechanism::HybridMechanism(PrivacyParams privacy, ClampRange clamp,
                                 std::uint64_t noise_seed)
    : privacy_(privacy), clamp_(clamp), rng_(noise_seed) {
  privacy_.validate();
  clamp_.validate();
}

double HybridMechanism::draw_noise() {
  if (!privacy_.noise_enabled()) return 0.0;
  return sample_laplace(1.0 / privacy_.epsilon, rng_);
}

void HybridMechanism::insert(double reward) {
  const double c = clamp_.clamp(reward);
  if (c != reward) ++clamp_events_;
  raw_total_ += c;
  ++count_;
  ++epoch_pos_;

  const double x = (c - clamp_.lo) / clamp_.width();

  // The new node sits at the level given by the trailing zeros of the
  // in-epoch position and absorbs the live nodes below it.
  const int lvl = std::countr_zero(static_cast<std::uint64_t>(epoch_pos_));
  if (lvl >= static_cast<int>(level_raw_.size())) {
    level_raw_.resize(lvl + 1, 0.0);
    level_noisy_.resize(lvl + 1, 0.0);
  }
  double acc = x;
  for (int j = 0; j < lvl; ++j) {
    acc += level_raw_[j];
    level_raw_[j] = 0.0;
    level_noisy_[j] = 0.0;
  }
  level_raw_[lvl] = acc;
  level_noisy_[lvl] = acc + draw_noise();

  if (epoch_pos_ == (std::int64_t{1} << epoch_)) {
    // Epoch complete: its root (level == epoch_) is final; fold and restart.
    completed_noisy_ += level_noisy_[lvl];
    completed_raw_ += level_raw_[lvl];
    std::fill(level_raw_.begin(), level_raw_.end(), 0.0);
    std::fill(level_noisy_.begin(), level_noisy_.end(), 0.0);
    ++epoch_;
    epoch_pos_ = 0;
  }
}

double HybridMechanism::private_sum() const {
  if (count_ == 0) {
    throw EmptyMechanismError("private_sum: mechanism has no inputs");
  }
  double s = completed_noisy_;
  std::uint64_t bits = static_cast<std::uint64_t>(epoch_pos_);
  while (bits != 0) {
    const int lvl = std::countr_zero(bits);
    s += level_noisy_[lvl];
    bits &= bits - 1;
  }
  return s * clamp_.width() + static_cast<double>(count_) * clamp_.lo;
}

int HybridMechanism::cover_size() const {
  return std::popcount(static_cast<std::uint64_t>(epoch_pos_));
}

PrivateSumReport HybridMechanism::report() const {
  PrivateSumReport r;
  r.n = count_;
  r.sum = private_sum();
  r.mean = r.sum / static_cast<double>(count_);
  r.h = error_certificate(static_cast<double>(count_), privacy_.epsilon, privacy_.delta);
  return r;
}

}  // namespace fedban
