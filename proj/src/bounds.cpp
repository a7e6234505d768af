#include "fedban/bounds.hpp"

#include <cmath>

#include "fedban/errors.hpp"

namespace fedban {

namespace {

void check_common(int agents, int arms, double horizon, double epsilon, double beta0) {
  if (agents < 1 || arms < 2) throw DomainError("regret bound: need M >= 1, K >= 2");
  if (!(horizon > 1.0)) throw DomainError("regret bound: horizon must exceed 1");
  if (std::isnan(epsilon) || !(epsilon > 0.0)) {
    throw DomainError("regret bound: epsilon must be positive");
  }
  if (!(beta0 > 0.0 && beta0 < 1.0)) throw DomainError("regret bound: beta0 must be in (0,1)");
}

}  // namespace

double master_worker_regret_bound(int agents, int arms, double horizon, double epsilon,
                                  double delta_min, double delta_max, double beta0) {
  check_common(agents, arms, horizon, epsilon, beta0);
  if (!(delta_min > 0.0) || !(delta_max >= delta_min)) {
    throw DomainError("regret bound: need 0 < delta_min <= delta_max");
  }
  const double ln_t = std::log(horizon);
  const double privacy_term =
      std::pow(8.0 * ln_t / (epsilon * (1.0 - beta0) * delta_min), 2.25);
  const double sampling_term = std::ceil(8.0 * ln_t / (delta_min * delta_min * beta0 * beta0));
  return static_cast<double>(agents) * static_cast<double>(arms) * delta_max *
         (4.0 + std::max(privacy_term, sampling_term));
}

double decentralized_regret_bound(int agents, int arms, double horizon, double epsilon,
                                  double rho, double sigma2, double c0,
                                  const std::vector<double>& c_i,
                                  const std::vector<double>& gaps, double beta0) {
  check_common(agents, arms, horizon, epsilon, beta0);
  if (!(rho > 1.0)) throw DomainError("regret bound: rho must exceed 1");
  if (!(sigma2 > 0.0)) throw DomainError("regret bound: sigma2 must be positive");
  if (static_cast<int>(c_i.size()) != agents) {
    throw DomainError("regret bound: c_i size must match agent count");
  }
  double delta_max = 0.0;
  for (double g : gaps) delta_max = std::max(delta_max, g);
  if (!(delta_max > 0.0)) throw DomainError("regret bound: all gaps are zero");

  const double ln_t = std::log(horizon);
  const double privacy_term =
      std::pow((2.0 + 2.0 * rho * ln_t) / (epsilon * (1.0 - beta0)), 2.25);

  double total = 2.0 * static_cast<double>(agents) * static_cast<double>(arms) * rho *
                 delta_max / (rho - 1.0);
  for (int i = 0; i < agents; ++i) {
    for (double gap : gaps) {
      if (!(gap > 0.0)) continue;
      const double sampling_term =
          std::ceil(c0 / (beta0 * beta0) +
                    8.0 * sigma2 * rho * (1.0 + c_i[static_cast<std::size_t>(i)]) * ln_t /
                        (beta0 * beta0 * gap));
      total += std::max(privacy_term, sampling_term);
    }
  }
  return total;
}

}  // namespace fedban
