#pragma once

#include <algorithm>
#include <vector>

#include "fedban/errors.hpp"

namespace fedban {

// Small dense row-major matrix. Deliberately minimal: the federated
// simulations only need square matrices of order <= 128, products,
// matrix-vector application and a symmetric eigensolver.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  static Matrix identity(int n);

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  void zero() { std::fill(data_.begin(), data_.end(), 0.0); }

  bool is_symmetric(double tol = 1e-12) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

// max_{r,c} |a - b|
double max_abs_diff(const Matrix& a, const Matrix& b);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // sorted descending
  Matrix eigenvectors;              // column p pairs with eigenvalues[p]
};

// Cyclic Jacobi eigensolver for symmetric matrices. Rotations sweep the
// upper triangle until every off-diagonal entry falls below `tol` in
// magnitude; throws NumericalFault if `max_sweeps` sweeps do not converge.
EigenDecomposition jacobi_eigh(const Matrix& a, double tol = 1e-12, int max_sweeps = 100);

}  // namespace fedban
