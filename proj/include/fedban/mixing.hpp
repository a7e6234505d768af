#pragma once

#include <vector>

#include "fedban/graph.hpp"
#include "fedban/linalg.hpp"

namespace fedban {

// Network-dependent constants that govern how far the running consensus can
// drift from the true network average (c0) and how much excess variance the
// mixing injects at each agent (c_i). Both are derived from the eigensystem
// of the mixing matrix.
struct SpectralConstants {
  double c0 = 0.0;
  std::vector<double> c_i;
};

// Doubly stochastic mixing matrix P = I - (kappa / d_max) * L built from the
// Laplacian L of a connected undirected graph, together with its eigensystem
// and the consensus constants used by the decentralized policy.
//
// Eigenvalues are sorted descending; lambda_1 = 1 always, and validation
// requires |lambda_p| < 1 for p >= 2 (otherwise consensus would not contract
// and SpectralGapError is thrown, suggesting a smaller kappa).
class MixingMatrix {
 public:
  // From a communication graph; kappa in (0, 1].
  static MixingMatrix from_graph(const Graph& g, double kappa);

  // Single-agent degenerate network: P = [1], c0 = 0, c_i = {0}. Lets the
  // decentralized algorithm collapse to ordinary UCB without special-casing
  // graph construction (which requires M >= 2).
  static MixingMatrix trivial();

  int size() const { return p_.rows(); }
  double kappa() const { return kappa_; }
  const Matrix& p() const { return p_; }
  const std::vector<double>& eigenvalues() const { return eig_.eigenvalues; }
  const Matrix& eigenvectors() const { return eig_.eigenvectors; }
  double c0() const { return constants_.c0; }
  const std::vector<double>& c_i() const { return constants_.c_i; }

 private:
  MixingMatrix() = default;
  void finish();  // eigensystem, validation, constants

  Matrix p_;
  double kappa_ = 0.0;
  EigenDecomposition eig_;
  SpectralConstants constants_;
};

// The constants by themselves, from an eigensystem (columns of `vectors`
// pair with `values`, both sorted descending). Exposed separately so tests
// can drive it with hand-built spectra.
//
//   c0   = sqrt(M) * sum_{p>=2} |l_p| / (1 - |l_p|)
//   c_i  = M * sum_p sum_{k>=2} |l_p||l_k| / (1 - |l_p||l_k|) * a_pk(i)
//
// with a_pk(i) built from the outer products of eigenvectors: writing
// w = (u_p u_k^T)_{ii} and the sign-split sums nu+ / nu- of u_p^d u_k^d over
// coordinates d,
//
//   a_pk(i) = nu+ * w            if l_p l_k >= 0 and w >= 0
//           = nu- * w            if l_p l_k >= 0 and w <  0
//           = max(|nu-|, nu+)    if l_p l_k <  0.
//
// Every term is nonnegative, so c_i >= 0 holds by construction. a_pk(i) is
// invariant under flipping the sign of any eigenvector, so the output does
// not depend on the sign convention the eigensolver happens to pick.
SpectralConstants spectral_constants(const std::vector<double>& values, const Matrix& vectors);

}  // namespace fedban
