// SPDX-License-Identifier: Apache-2.0
#include "swrls/densela.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "swrls/error.hpp"
#include "swrls/kernels.hpp"

namespace swrls {

LowRankBatch::LowRankBatch(Matrix columns, std::vector<int> signs)
    : columns_(std::move(columns)), signs_(std::move(signs)) {
  if (signs_.size() != columns_.rows()) {
    throw DimensionError("low-rank batch: " + std::to_string(columns_.rows()) + " columns but " +
                         std::to_string(signs_.size()) + " signs");
  }
  if (signs_.empty()) throw DimensionError("low-rank batch needs at least one column");
  for (int s : signs_)
    if (s != 1 && s != -1) throw DimensionError("signature entries must be +1 or -1");
}

void LowRankBatch::set_sign(std::size_t l, int s) {
  if (s != 1 && s != -1) throw DimensionError("signature entries must be +1 or -1");
  signs_[l] = s;
}

SymMatrix LowRankBatch::outer() const {
  SymMatrix out(dimension());
  for (std::size_t l = 0; l < rank(); ++l) out.add_outer(static_cast<double>(signs_[l]), column(l));
  return out;
}

// ---------------------------------------------------------------------------
// Bunch-Kaufman

namespace {

constexpr double kBunchKaufmanAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8

}  // namespace

IndefiniteFactorization::IndefiniteFactorization(const SymMatrix& s)
    : lower_(Matrix::identity(s.order())),
      block_(s.order(), s.order()),
      perm_(s.order()),
      block_size_(s.order(), 0) {
  const std::size_t n = s.order();
  Matrix w = s.full();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  const double tol = kPivotTolerance * max_abs(w);
  if (n == 0) return;
  if (tol == 0.0) throw SingularUpdateError("indefinite factorization: zero matrix");

  std::size_t k = 0;
  // Symmetric interchange of positions i and j of the active block; rows of
  // L already computed (columns < k) follow the permutation.
  auto interchange = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(w(i, c), w(j, c));
    for (std::size_t r = 0; r < n; ++r) std::swap(w(r, i), w(r, j));
    for (std::size_t c = 0; c < k; ++c) std::swap(lower_(i, c), lower_(j, c));
    std::swap(perm_[i], perm_[j]);
  };

  while (k < n) {
    const double absakk = std::abs(w(k, k));
    double colmax = 0.0;
    std::size_t r = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(w(i, k)) > colmax) {
        colmax = std::abs(w(i, k));
        r = i;
      }
    }
    if (std::max(absakk, colmax) < tol) {
      throw SingularUpdateError("indefinite factorization: pivot below tolerance at column " +
                                std::to_string(k));
    }

    bool two_by_two = false;
    if (absakk < kBunchKaufmanAlpha * colmax) {
      double rowmax = 0.0;
      for (std::size_t j = k; j < n; ++j)
        if (j != r) rowmax = std::max(rowmax, std::abs(w(r, j)));
      if (absakk * rowmax >= kBunchKaufmanAlpha * colmax * colmax) {
        // keep the diagonal pivot
      } else if (std::abs(w(r, r)) >= kBunchKaufmanAlpha * rowmax) {
        interchange(k, r);
      } else {
        two_by_two = true;
        interchange(k + 1, r);
      }
    }

    if (!two_by_two) {
      const double d = w(k, k);
      if (std::abs(d) < tol) {
        throw SingularUpdateError("indefinite factorization: pivot below tolerance at column " +
                                  std::to_string(k));
      }
      block_(k, k) = d;
      block_size_[k] = 1;
      if (d < 0.0) ++negatives_;
      for (std::size_t i = k + 1; i < n; ++i) lower_(i, k) = w(i, k) / d;
      for (std::size_t i = k + 1; i < n; ++i) {
        const double li = lower_(i, k);
        for (std::size_t j = k + 1; j < n; ++j) w(i, j) -= li * w(j, k);
      }
      k += 1;
    } else {
      const double e11 = w(k, k);
      const double e21 = w(k + 1, k);
      const double e22 = w(k + 1, k + 1);
      const double det = e11 * e22 - e21 * e21;
      const double scale = std::max({std::abs(e11), std::abs(e21), std::abs(e22)});
      if (std::abs(det) < tol * scale) {
        throw SingularUpdateError("indefinite factorization: singular 2x2 pivot at column " +
                                  std::to_string(k));
      }
      block_(k, k) = e11;
      block_(k + 1, k) = e21;
      block_(k, k + 1) = e21;
      block_(k + 1, k + 1) = e22;
      block_size_[k] = 2;
      if (det < 0.0) {
        negatives_ += 1;
      } else if (e11 < 0.0) {
        negatives_ += 2;
      }
      for (std::size_t i = k + 2; i < n; ++i) {
        const double c1 = w(i, k);
        const double c2 = w(i, k + 1);
        lower_(i, k) = (c1 * e22 - c2 * e21) / det;
        lower_(i, k + 1) = (c2 * e11 - c1 * e21) / det;
      }
      for (std::size_t i = k + 2; i < n; ++i) {
        const double l1 = lower_(i, k);
        const double l2 = lower_(i, k + 1);
        for (std::size_t j = k + 2; j < n; ++j) w(i, j) -= l1 * w(j, k) + l2 * w(j, k + 1);
      }
      k += 2;
    }
  }
}

void IndefiniteFactorization::solve_in_place(std::span<double> b) const {
  const std::size_t n = order();
  if (b.size() != n) throw DimensionError("indefinite solve: right-hand side length");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) y[i] -= lower_(i, j) * y[j];
  for (std::size_t k = 0; k < n;) {
    if (block_size_[k] == 1) {
      y[k] /= block_(k, k);
      k += 1;
    } else {
      const double e11 = block_(k, k);
      const double e21 = block_(k + 1, k);
      const double e22 = block_(k + 1, k + 1);
      const double det = e11 * e22 - e21 * e21;
      const double z1 = y[k];
      const double z2 = y[k + 1];
      y[k] = (e22 * z1 - e21 * z2) / det;
      y[k + 1] = (e11 * z2 - e21 * z1) / det;
      k += 2;
    }
  }
  for (std::size_t ii = n; ii-- > 0;)
    for (std::size_t j = ii + 1; j < n; ++j) y[ii] -= lower_(j, ii) * y[j];
  for (std::size_t i = 0; i < n; ++i) b[perm_[i]] = y[i];
}

Matrix IndefiniteFactorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != order()) throw DimensionError("indefinite solve: right-hand side rows");
  Matrix x = rhs;
  std::vector<double> col(order());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    for (std::size_t i = 0; i < order(); ++i) col[i] = rhs(i, c);
    solve_in_place(col);
    for (std::size_t i = 0; i < order(); ++i) x(i, c) = col[i];
  }
  return x;
}

Matrix solve_indefinite(const SymMatrix& s, const Matrix& rhs) {
  return IndefiniteFactorization(s).solve(rhs);
}

// ---------------------------------------------------------------------------
// Low-rank inverse updates

Matrix batch_inverse_update_raw(const SymMatrix& b_inv, const LowRankBatch& batch) {
  const std::size_t n = b_inv.order();
  const std::size_t r = batch.rank();
  if (batch.dimension() != n) throw DimensionError("batch dimension does not match inverse");

  // G = (B^{-1} Q)^T, one row per column of Q.
  Matrix g(r, n);
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t i = 0; i < n; ++i) g(l, i) = kernels::dot(b_inv.row(i), batch.column(l));

  Matrix u(r, r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) u(a, b) = kernels::dot(batch.column(a), g.row(b));
    u(a, a) += static_cast<double>(batch.sign(a));
  }
  const IndefiniteFactorization fac(SymMatrix::from(u));
  const Matrix x = fac.solve(g);  // U^{-1} Q^T B^{-1}

  Matrix out = b_inv.full();
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    for (std::size_t l = 0; l < r; ++l) kernels::axpy(-g(l, i), x.row(l), row);
  }
  return out;
}

SymMatrix batch_inverse_update(const SymMatrix& b_inv, const LowRankBatch& batch) {
  return symmetrized(batch_inverse_update_raw(b_inv, batch));
}

Matrix chain_sherman_morrison(const SymMatrix& b_inv, const LowRankBatch& batch) {
  const std::size_t n = b_inv.order();
  if (batch.dimension() != n) throw DimensionError("batch dimension does not match inverse");
  Matrix m = b_inv.full();
  std::vector<double> left(n);
  std::vector<double> right(n);
  for (std::size_t l = 0; l < batch.rank(); ++l) {
    const auto x = batch.column(l);
    const double s = static_cast<double>(batch.sign(l));
    // left = M x, right = M^T x; the intermediate inverse is not assumed symmetric.
    for (std::size_t i = 0; i < n; ++i) left[i] = kernels::dot(m.row(i), x);
    std::fill(right.begin(), right.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) kernels::axpy(x[i], m.row(i), right);
    const double quad = kernels::dot(x, left);
    const double denom = 1.0 + s * quad;
    if (std::abs(denom) < kPivotTolerance * (1.0 + std::abs(quad))) {
      throw IntermediateSingularityError(
          "Sherman-Morrison chain: vanishing denominator at column " + std::to_string(l), l);
    }
    const double coef = -s / denom;
    for (std::size_t i = 0; i < n; ++i) kernels::axpy(coef * left[i], right, m.row(i));
  }
  return m;
}

// ---------------------------------------------------------------------------
// SPD inverse

SymMatrix spd_inverse(const SymMatrix& a) {
  const std::size_t n = a.order();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto lj = l.row(j).first(j);
    const double d = a(j, j) - kernels::dot(lj, lj);
    if (!(d > floor)) {
      throw NotPositiveDefiniteError("Cholesky pivot " + std::to_string(j) +
                                     " is not positive (insufficient excitation?)");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - kernels::dot(l.row(i).first(j), lj)) / ljj;
  }

  // Rows of `inv_t` are the columns of L^{-1}, so A^{-1} = inv_t * inv_t^T
  // restricted to the overlapping tails.
  Matrix inv_t(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    inv_t(c, c) = 1.0 / l(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = c; j < i; ++j) acc += l(i, j) * inv_t(c, j);
      inv_t(c, i) = -acc / l(i, i);
    }
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernels::dot(inv_t.row(i).subspan(j), inv_t.row(j).subspan(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return symmetrized(std::move(out));
}

// ---------------------------------------------------------------------------
// Jacobi eigenvalues

std::vector<double> symmetric_eigenvalues(const SymMatrix& a) {
  const std::size_t n = a.order();
  Matrix m = a.full();
  constexpr int kMaxSweeps = 100;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        if (std::abs(apq) <= eps * std::sqrt(std::abs(m(p, p)) * std::abs(m(q, q))) ||
            std::abs(apq) < 1e-300) {
          m(p, q) = 0.0;
          m(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        m(p, p) -= t * apq;
        m(q, q) += t * apq;
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = m(r, p);
          const double h = m(r, q);
          m(r, p) = g - s * (h + g * tau);
          m(p, r) = m(r, p);
          m(r, q) = h + s * (g - h * tau);
          m(q, r) = m(r, q);
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double condition_number(const SymMatrix& a) {
  const auto ev = symmetric_eigenvalues(a);
  if (ev.empty()) return 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : ev) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (lo < 1e-300) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace swrls
