// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swrls {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& a);
/// max_i sum_j |a_ij|
double inf_norm(const Matrix& a);
double max_abs(const Matrix& a);
/// ||a - b||_F / ||b||_F (absolute when b is zero)
double relative_frobenius_error(const Matrix& a, const Matrix& b);
/// max |a_ij - a_ji| / max |a_ij| for a square matrix.
double relative_asymmetry(const Matrix& a);

/// Square matrix kept symmetric; full storage so rows are contiguous for the
/// kernels. Mutators that can break symmetry finish with symmetrize().
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n, n) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  /// Takes (a + a^T) / 2; throws DimensionError when a is not square.
  static SymMatrix from(const Matrix& a);

  std::size_t order() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  std::span<const double> row(std::size_t i) const noexcept { return m_.row(i); }
  const Matrix& full() const noexcept { return m_; }

  /// this += alpha * x * x^T
  void add_outer(double alpha, std::span<const double> x);
  void add_diagonal(double alpha);
  void scale(double alpha);

  /// max |a_ij - a_ji| / max |a_ij|
  double asymmetry() const;

 private:
  friend SymMatrix symmetrized(Matrix&& a);
  explicit SymMatrix(Matrix&& m) : m_(std::move(m)) {}
  void symmetrize();

  Matrix m_;
};

/// Re-symmetrizes a square matrix in place and wraps it.
SymMatrix symmetrized(Matrix&& a);

}  // namespace swrls
