#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace graspeeg {

// Dense row-major matrix of doubles. Rows are channels (or components, or
// frequencies) and columns are samples throughout the library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;
  // Copy of columns [begin, end).
  Matrix col_range(std::size_t begin, std::size_t end) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

// Horizontal concatenation; all blocks must share a row count.
Matrix hconcat(std::span<const Matrix> blocks);

// Largest absolute elementwise difference; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues are
// returned in descending order with eigenvectors as the matching columns.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol = 1e-14, int max_sweeps = 100);

// Cholesky factor L (lower) of a symmetric positive definite matrix. Throws
// NumericError if a pivot falls below rel_pivot_tol times the mean diagonal.
Matrix cholesky(const Matrix& spd, double rel_pivot_tol = 1e-10);

// Solves (L L^T) x = b given the Cholesky factor.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

// General inverse by Gauss-Jordan with partial pivoting.
Matrix inverse(const Matrix& a);

}  // namespace graspeeg
