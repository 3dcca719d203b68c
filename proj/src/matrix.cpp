// SPDX-License-Identifier: Apache-2.0
#include "swrls/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swrls/error.hpp"
#include "swrls/kernels.hpp"

namespace swrls {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matrix product: " + std::to_string(a.cols()) + " columns vs " +
                         std::to_string(b.rows()) + " rows");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) kernels::axpy(a(i, l), b.row(l), out);
  }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference");
  Matrix c = a;
  kernels::axpy(-1.0, b.values(), c.values());
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = kernels::dot(a.row(i), x);
  return y;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double inf_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const Matrix& a) {
  double best = 0.0;
  for (double v : a.values()) best = std::max(best, std::abs(v));
  return best;
}

double relative_frobenius_error(const Matrix& a, const Matrix& b) {
  const double num = frobenius_norm(a - b);
  const double den = frobenius_norm(b);
  return den > 0.0 ? num / den : num;
}

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.m_(i, i) = d[i];
  return s;
}

SymMatrix SymMatrix::from(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetric matrix must be square");
  Matrix copy = a;
  return symmetrized(std::move(copy));
}

void SymMatrix::add_outer(double alpha, std::span<const double> x) {
  if (x.size() != order()) throw DimensionError("outer product dimension");
  for (std::size_t i = 0; i < order(); ++i) kernels::axpy(alpha * x[i], x, m_.row(i));
}

void SymMatrix::add_diagonal(double alpha) {
  for (std::size_t i = 0; i < order(); ++i) m_(i, i) += alpha;
}

void SymMatrix::scale(double alpha) { kernels::scale(alpha, m_.values()); }

double relative_asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("asymmetry of a non-square matrix");
  const double scale = max_abs(a);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst / scale;
}

double SymMatrix::asymmetry() const { return relative_asymmetry(m_); }

void SymMatrix::symmetrize() {
  for (std::size_t i = 0; i < order(); ++i) {
    for (std::size_t j = i + 1; j < order(); ++j) {
      const double v = 0.5 * (m_(i, j) + m_(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix symmetrized(Matrix&& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetric matrix must be square");
  SymMatrix s(std::move(a));
  s.symmetrize();
  return s;
}

}  // namespace swrls
