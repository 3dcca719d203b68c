// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small dense symmetric linear algebra: low-rank inverse updates, a pivoted
// symmetric-indefinite solver, Cholesky inversion and Jacobi eigenvalues.

#include <cstddef>
#include <span>
#include <vector>

#include "swrls/matrix.hpp"

namespace swrls {

/// Signed low-rank correction Q * diag(D) * Q^T. Columns of Q are stored as
/// rows of `columns()` so each one is contiguous.
class LowRankBatch {
 public:
  LowRankBatch(std::size_t dimension, std::size_t rank)
      : columns_(rank, dimension), signs_(rank, 1) {}
  /// `columns` is (rank x n); `signs` entries must be +1 or -1.
  LowRankBatch(Matrix columns, std::vector<int> signs);

  std::size_t dimension() const noexcept { return columns_.cols(); }
  std::size_t rank() const noexcept { return columns_.rows(); }

  std::span<const double> column(std::size_t l) const noexcept { return columns_.row(l); }
  std::span<double> column(std::size_t l) noexcept { return columns_.row(l); }
  int sign(std::size_t l) const noexcept { return signs_[l]; }
  void set_sign(std::size_t l, int s);

  const Matrix& columns() const noexcept { return columns_; }
  std::span<const int> signs() const noexcept { return signs_; }

  /// Q diag(D) Q^T
  SymMatrix outer() const;

 private:
  Matrix columns_;
  std::vector<int> signs_;
};

/// Relative pivot threshold of the symmetric-indefinite factorization.
inline constexpr double kPivotTolerance = 1e-12;

/// P S P^T = L B L^T with B block diagonal (1x1 and 2x2 blocks), using
/// Bunch-Kaufman partial pivoting.
class IndefiniteFactorization {
 public:
  /// Throws SingularUpdateError when a pivot falls below
  /// kPivotTolerance * max|S_ij|.
  explicit IndefiniteFactorization(const SymMatrix& s);

  std::size_t order() const noexcept { return lower_.rows(); }
  /// Solves S x = b in place.
  void solve_in_place(std::span<double> b) const;
  /// Solves S X = R column by column; R has order() rows.
  Matrix solve(const Matrix& rhs) const;

  /// Number of negative eigenvalues of S (Sylvester inertia of B).
  std::size_t negative_count() const noexcept { return negatives_; }

 private:
  Matrix lower_;                 // unit lower triangular
  Matrix block_;  // only the tridiagonal band is populated
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> block_size_;  // 1 or 2 at the first index of each block
  std::size_t negatives_ = 0;
};

/// A^{-1} for A = B + Q D Q^T in a single Woodbury pass:
/// A^{-1} = B^{-1} - B^{-1} Q U^{-1} Q^T B^{-1}, U = D + Q^T B^{-1} Q.
/// Result is re-symmetrized. Throws SingularUpdateError when U is singular.
SymMatrix batch_inverse_update(const SymMatrix& b_inv, const LowRankBatch& batch);

/// Same as batch_inverse_update without the final re-symmetrization, for
/// measuring the asymmetry the pass itself produces.
Matrix batch_inverse_update_raw(const SymMatrix& b_inv, const LowRankBatch& batch);

/// A^{-1} by one Sherman-Morrison step per column, each step using the
/// previous intermediate inverse. No symmetrization is applied, so the
/// result is returned as a general matrix. Throws
/// IntermediateSingularityError when 1 + s x^T M x collapses.
Matrix chain_sherman_morrison(const SymMatrix& b_inv, const LowRankBatch& batch);

/// Solves S X = rhs (rhs is n x m, column right-hand sides).
Matrix solve_indefinite(const SymMatrix& s, const Matrix& rhs);

/// Inverse of a symmetric positive definite matrix via Cholesky.
/// Throws NotPositiveDefiniteError when a pivot is not safely positive.
SymMatrix spd_inverse(const SymMatrix& a);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(const SymMatrix& a);

/// max|eig| / min|eig|; +infinity when min|eig| < 1e-300.
double condition_number(const SymMatrix& a);

}  // namespace swrls
