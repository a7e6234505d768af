#pragma once

#include <cstdint>
#include <vector>

#include "fedban/errors.hpp"
#include "fedban/rng.hpp"

namespace fedban {

// Inverse CDF of the zero-centred Laplace distribution with scale b,
// evaluated at u in (0, 1). Written so that sampling with scale 2b on the
// same uniform gives exactly twice the scale-b output.
double laplace_icdf(double u, double b);

// One Laplace draw; consumes exactly one open-interval uniform.
double sample_laplace(double scale, Rng& rng);

// Differential-privacy budget for one private-sum stream. epsilon may be
// +infinity, which turns the mechanism into a plain (noiseless) prefix sum
// and zeroes the privacy bonus used by the bandit indices.
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-6;

  bool noise_enabled() const;
  void validate() const;  // throws DomainError
};

// High-probability bound on the privacy-induced error of a private mean over
// n observations:
//
//   h(n) = (1/epsilon) * ln(n)^{3/2} * ln(1/delta) / n.
//
// Natural logarithms throughout; h(1) = 0. The bandit policies add h(n) to
// their indices so that privacy noise cannot hide a good arm.
double error_certificate(double n, double epsilon, double delta);

// Closed reward window [lo, hi]. Inputs are clamped into it before entering
// a mechanism; the Laplace scale then protects a bounded quantity.
struct ClampRange {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double clamp(double x) const;
  void validate() const;  // throws ConfigError unless lo < hi and both finite
};

// Snapshot of a mechanism's private state, the only view policy code sees.
struct PrivateSumReport {
  std::int64_t n = 0;   // number of inserted rewards
  double sum = 0.0;     // private running sum, in reward units
  double mean = 0.0;    // sum / n
  double h = 0.0;       // error_certificate(n, epsilon, delta)
};

// Streaming private prefix sum over an unbounded reward sequence.
//
// The stream is split into epochs of doubling length: inputs 1, 2..3, 4..7,
// 8..15, ... (1-indexed). Inside an epoch a binary tree of partial sums is
// maintained as one live node per level; each node draws Laplace(1/epsilon)
// noise exactly once, when it is created, and the prefix query sums the noisy
// nodes covering the in-epoch prefix (at most one per set bit of the in-epoch
// position). When an epoch fills, its noisy root is folded into a running
// total of completed epochs, so a query never touches more than
// log2(epoch length) + 1 noisy terms on top of that total.
//
// Inputs are clamped to `clamp` and rescaled to [0, 1] internally; queries
// map back to reward units. With noise disabled the query equals the exact
// clamped prefix sum.
class HybridMechanism {
 public:
  HybridMechanism(PrivacyParams privacy, ClampRange clamp, std::uint64_t noise_seed);

  void insert(double reward);

  // Private sum of everything inserted so far. Throws EmptyMechanismError
  // before the first insert.
  double private_sum() const;

  PrivateSumReport report() const;

  std::int64_t count() const { return count_; }
  std::int64_t clamp_events() const { return clamp_events_; }

  // Number of noisy in-epoch nodes the current query touches.
  int cover_size() const;
  int epoch_index() const { return epoch_; }

  const PrivacyParams& privacy() const { return privacy_; }
  const ClampRange& clamp_range() const { return clamp_; }

 private:
  double draw_noise();

  PrivacyParams privacy_;
  ClampRange clamp_;
  Rng rng_;

  int epoch_ = 0;               // current epoch, capacity 2^epoch_ inputs
  std::int64_t epoch_pos_ = 0;  // inputs seen in the current epoch
  std::vector<double> level_raw_;    // live node per level, rescaled units
  std::vector<double> level_noisy_;  // node value + its cached noise
  double completed_noisy_ = 0.0;     // folded noisy roots of filled epochs
  double completed_raw_ = 0.0;

  double raw_total_ = 0.0;  // exact clamped sum, reward units
  std::int64_t count_ = 0;
  std::int64_t clamp_events_ = 0;

  friend struct MechanismProbe;
};

// Test-only window onto the exact (non-private) accumulators. Policy code
// must never read these; they exist so tests can compare the private output
// against ground truth.
struct MechanismProbe {
  static double raw_total(const HybridMechanism& m) { return m.raw_total_; }
  static double completed_raw(const HybridMechanism& m) { return m.completed_raw_; }
};

}  // namespace fedban
