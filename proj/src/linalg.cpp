#include "fedban/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fedban {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
  if (rows < 0 || cols < 0) throw DomainError("matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r) {
    for (int c = r + 1; c < cols_; ++c) {
      if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
    }
  }
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* orow = out.row(i);
      for (int j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  if (a.cols() != static_cast<int>(x.size())) throw DomainError("matvec: size mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) acc += arow[j] * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      m = std::max(m, std::abs(a(r, c) - b(r, c)));
    }
  }
  return m;
}

namespace {

double max_offdiag(const Matrix& a) {
  double m = 0.0;
  for (int p = 0; p < a.rows(); ++p) {
    for (int q = p + 1; q < a.cols(); ++q) {
      m = std::max(m, std::abs(a(p, q)));
    }
  }
  return m;
}

}  // namespace

EigenDecomposition jacobi_eigh(const Matrix& a_in, double tol, int max_sweeps) {
  const int n = a_in.rows();
  if (n != a_in.cols()) throw DomainError("jacobi_eigh: matrix must be square");
  if (!a_in.is_symmetric(1e-9)) throw DomainError("jacobi_eigh: matrix must be symmetric");

  Matrix a = a_in;
  Matrix v = Matrix::identity(n);

  bool converged = (n <= 1) || max_offdiag(a) <= tol;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= tol) continue;

        // Stable rotation angle (Numerical Recipes form): pick the smaller
        // root of t^2 + 2t*theta - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e154) {
          t = 0.5 / theta;  // avoid overflow in theta^2
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
    converged = max_offdiag(a) <= tol;
  }
  if (!converged) {
    throw NumericalFault("jacobi_eigh: no convergence after " + std::to_string(max_sweeps) +
                         " sweeps");
  }

  EigenDecomposition out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.eigenvalues[static_cast<std::size_t>(i)] = a(i, i);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return out.eigenvalues[static_cast<std::size_t>(x)] >
           out.eigenvalues[static_cast<std::size_t>(y)];
  });

  EigenDecomposition sorted;
  sorted.eigenvalues.resize(static_cast<std::size_t>(n));
  sorted.eigenvectors = Matrix(n, n, 0.0);
  for (int col = 0; col < n; ++col) {
    const int src = order[static_cast<std::size_t>(col)];
    sorted.eigenvalues[static_cast<std::size_t>(col)] =
        out.eigenvalues[static_cast<std::size_t>(src)];
    for (int r = 0; r < n; ++r) sorted.eigenvectors(r, col) = v(r, src);
  }
  return sorted;
}

}  // namespace fedban
