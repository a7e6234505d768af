#pragma once

#include <vector>

namespace fedban {

// Closed-form regret envelopes the simulated curves are checked against.
// Both are evaluated at the analysis split point beta0 = 0.5 by default and
// grow like ln(T)^{2.25} in the privacy-dominated regime.

// Master-worker envelope:
//   M K dmax * (4 + max[ (8 ln T / (eps (1-b0) dmin))^{9/4},
//                        ceil(8 ln T / (dmin^2 b0^2)) ])
// With eps = +inf (noise off) the first bracket vanishes.
double master_worker_regret_bound(int agents, int arms, double horizon, double epsilon,
                                  double delta_min, double delta_max, double beta0 = 0.5);

// Decentralized envelope:
//   2 M K rho dmax / (rho - 1)
//   + sum_i sum_{j: gap > 0} max[ ((2 + 2 rho ln T) / (eps (1-b0)))^{9/4},
//                                 ceil(c0 / b0^2
//                                      + 8 sigma^2 rho (1+c_i) ln T / (b0^2 gap_j)) ]
double decentralized_regret_bound(int agents, int arms, double horizon, double epsilon,
                                  double rho, double sigma2, double c0,
                                  const std::vector<double>& c_i,
                                  const std::vector<double>& gaps, double beta0 = 0.5);

}  // namespace fedban
