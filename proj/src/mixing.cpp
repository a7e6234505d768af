#include "fedban/mixing.hpp"

#include <cmath>

namespace fedban {

MixingMatrix MixingMatrix::from_graph(const Graph& g, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw ConfigError("mixing: kappa must lie in (0, 1]");
  }
  const int m = g.size();
  MixingMatrix mm;
  mm.kappa_ = kappa;
  mm.p_ = Matrix::identity(m);
  const double w = kappa / static_cast<double>(g.max_degree());
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      if (u == v) {
        mm.p_(u, u) = 1.0 - w * static_cast<double>(g.degree(u));
      } else if (g.adjacent(u, v)) {
        mm.p_(u, v) = w;
      }
    }
  }
  mm.finish();
  return mm;
}

MixingMatrix MixingMatrix::trivial() {
  MixingMatrix mm;
  mm.kappa_ = 1.0;
  mm.p_ = Matrix::identity(1);
  mm.finish();
  return mm;
}

void MixingMatrix::finish() {
  const int m = p_.rows();

  // Row sums of I - (kappa/d_max) L are 1 by construction; assert anyway so a
  // bad custom path is caught close to the source.
  for (int r = 0; r < m; ++r) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += p_(r, c);
    if (std::abs(s - 1.0) > 1e-9) {
      throw NumericalFault("mixing: row sum drifted from 1");
    }
  }

  eig_ = jacobi_eigh(p_);

  if (std::abs(eig_.eigenvalues.front() - 1.0) > 1e-9) {
    throw NumericalFault("mixing: leading eigenvalue is not 1");
  }
  for (int p = 1; p < m; ++p) {
    if (std::abs(eig_.eigenvalues[static_cast<std::size_t>(p)]) >= 1.0 - 1e-12) {
      throw SpectralGapError(
          "mixing: |lambda_" + std::to_string(p + 1) +
          "| >= 1, consensus cannot contract; use a smaller kappa or a better-connected graph");
    }
  }

  constants_ = spectral_constants(eig_.eigenvalues, eig_.eigenvectors);
}

SpectralConstants spectral_constants(const std::vector<double>& values, const Matrix& vectors) {
  const int m = static_cast<int>(values.size());
  if (vectors.rows() != m || vectors.cols() != m) {
    throw DomainError("spectral_constants: eigensystem shape mismatch");
  }

  SpectralConstants out;
  out.c_i.assign(static_cast<std::size_t>(m), 0.0);

  const double sqrt_m = std::sqrt(static_cast<double>(m));
  for (int p = 1; p < m; ++p) {
    const double al = std::abs(values[static_cast<std::size_t>(p)]);
    out.c0 += al / (1.0 - al);
  }
  out.c0 *= sqrt_m;

  for (int p = 0; p < m; ++p) {
    const double lp = values[static_cast<std::size_t>(p)];
    for (int k = 1; k < m; ++k) {
      const double lk = values[static_cast<std::size_t>(k)];
      const double prod = std::abs(lp) * std::abs(lk);
      if (prod == 0.0) continue;
      const double coef = prod / (1.0 - prod);

      // Sign-split sums of the eigenvector coordinate products.
      double nu_pos = 0.0, nu_neg = 0.0;
      for (int d = 0; d < m; ++d) {
        const double t = vectors(d, p) * vectors(d, k);
        if (t >= 0.0) nu_pos += t;
        if (t <= 0.0) nu_neg += t;
      }

      const bool same_sign = lp * lk >= 0.0;
      const double cross_cap = std::max(std::abs(nu_neg), nu_pos);
      for (int i = 0; i < m; ++i) {
        const double w = vectors(i, p) * vectors(i, k);
        double a;
        if (same_sign) {
          a = (w >= 0.0) ? nu_pos * w : nu_neg * w;
        } else {
          a = cross_cap;
        }
        out.c_i[static_cast<std::size_t>(i)] += coef * a;
      }
    }
  }
  for (auto& ci : out.c_i) ci *= static_cast<double>(m);
  return out;
}

}  // namespace fedban
