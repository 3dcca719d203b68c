// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "swrls/densela.hpp"
#include "swrls/error.hpp"
#include "swrls/oracle.hpp"

namespace swrls {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, oracle::CounterRng& rng) {
  Matrix m(r, c);
  for (auto& x : m.values()) x = rng.normal();
  return m;
}

/// G G^T + n I, comfortably positive definite.
SymMatrix random_spd(std::size_t n, oracle::CounterRng& rng) {
  const Matrix g = random_matrix(n, n, rng);
  SymMatrix a = SymMatrix::from(g * g.transposed());
  a.add_diagonal(static_cast<double>(n));
  return a;
}

SymMatrix random_symmetric(std::size_t n, oracle::CounterRng& rng) {
  return SymMatrix::from(random_matrix(n, n, rng));
}

/// Additions plus removals scaled so that A = B + Q D Q^T stays positive definite.
LowRankBatch random_batch(const SymMatrix& b_inv, std::size_t adds, std::size_t removes,
                          oracle::CounterRng& rng) {
  const std::size_t n = b_inv.order();
  LowRankBatch batch(n, adds + removes);
  for (std::size_t l = 0; l < adds + removes; ++l) {
    auto col = batch.column(l);
    for (auto& x : col) x = rng.normal();
    if (l >= adds) {
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) quad += col[i] * b_inv(i, j) * col[j];
      const double s = std::sqrt(0.5 / static_cast<double>(removes) / quad);
      for (auto& x : col) x *= s;
      batch.set_sign(l, -1);
    }
  }
  return batch;
}

Matrix assembled_inverse(const SymMatrix& b, const LowRankBatch& batch) {
  Matrix a = b.full();
  for (std::size_t l = 0; l < batch.rank(); ++l) {
    const auto c = batch.column(l);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += batch.sign(l) * c[i] * c[j];
  }
  return oracle::direct_inverse(a);
}

TEST(BatchInverseUpdate, SingleAdditionOnIdentity) {
  LowRankBatch batch(Matrix(1, 2), {+1});
  batch.column(0)[0] = 1.0;
  const auto out = batch_inverse_update(SymMatrix::identity(2), batch);
  EXPECT_NEAR(out(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(out(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(out(0, 1), 0.0, 1e-15);
}

TEST(BatchInverseUpdate, AddThenRemoveSameColumnIsIdentityMap) {
  oracle::CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 30);
    const SymMatrix b_inv = spd_inverse(random_spd(n, rng));
    LowRankBatch batch(n, 2);
    batch.set_sign(1, -1);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rng.normal();
      batch.column(0)[i] = v;
      batch.column(1)[i] = v;
    }
    const auto out = batch_inverse_update(b_inv, batch);
    EXPECT_LE(relative_frobenius_error(out.full(), b_inv.full()), 1e-12);
  }
}

TEST(BatchInverseUpdate, MatchesDirectInverseSmall) {
  oracle::CounterRng rng(5);
  const SymMatrix b = random_spd(5, rng);
  const SymMatrix b_inv = spd_inverse(b);
  const LowRankBatch batch = random_batch(b_inv, 3, 2, rng);
  const auto out = batch_inverse_update(b_inv, batch);
  EXPECT_LE(relative_frobenius_error(out.full(), assembled_inverse(b, batch)), 1e-10);
  EXPECT_EQ(out.asymmetry(), 0.0);
}

TEST(BatchInverseUpdate, RandomTrialsProperty) {
  oracle::CounterRng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 48);
    const std::size_t rank = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const std::size_t removes = static_cast<std::size_t>(rng.uniform() * static_cast<double>(rank));
    const SymMatrix b = random_spd(n, rng);
    const SymMatrix b_inv = spd_inverse(b);
    const LowRankBatch batch = random_batch(b_inv, rank - removes, removes, rng);
    const auto out = batch_inverse_update(b_inv, batch);
    ASSERT_LE(relative_frobenius_error(out.full(), assembled_inverse(b, batch)), 1e-9)
        << "trial " << trial << " n=" << n << " rank=" << rank;
    ASSERT_EQ(out.asymmetry(), 0.0);
  }
}

TEST(BatchInverseUpdate, SingularUpdateDetected) {
  // Removing e_1 e_1^T from the identity leaves a singular matrix.
  LowRankBatch batch(Matrix(1, 3), {-1});
  batch.column(0)[0] = 1.0;
  EXPECT_THROW(batch_inverse_update(SymMatrix::identity(3), batch), SingularUpdateError);
}

TEST(BatchInverseUpdate, RejectsDimensionMismatch) {
  LowRankBatch batch(4, 1);
  EXPECT_THROW(batch_inverse_update(SymMatrix::identity(3), batch), DimensionError);
  EXPECT_THROW(LowRankBatch(Matrix(2, 3), {1}), DimensionError);
  EXPECT_THROW(LowRankBatch(Matrix(1, 3), {2}), DimensionError);
}

TEST(ChainShermanMorrison, SingleColumnEqualsBatch) {
  oracle::CounterRng rng(8);
  const SymMatrix b_inv = spd_inverse(random_spd(7, rng));
  const LowRankBatch batch = random_batch(b_inv, 1, 0, rng);
  const Matrix chain = chain_sherman_morrison(b_inv, batch);
  const auto batch_out = batch_inverse_update(b_inv, batch);
  EXPECT_LE(relative_frobenius_error(chain, batch_out.full()), 1e-14);
}

TEST(ChainShermanMorrison, AddRemoveReturnsInput) {
  oracle::CounterRng rng(9);
  const SymMatrix b_inv = spd_inverse(random_spd(6, rng));
  LowRankBatch batch(6, 2);
  batch.set_sign(1, -1);
  for (std::size_t i = 0; i < 6; ++i) batch.column(0)[i] = batch.column(1)[i] = rng.normal();
  EXPECT_LE(relative_frobenius_error(chain_sherman_morrison(b_inv, batch), b_inv.full()), 1e-12);
}

TEST(ChainShermanMorrison, AgreesWithBatchOnMixedUpdates) {
  oracle::CounterRng rng(10);
  const SymMatrix b = random_spd(12, rng);
  const SymMatrix b_inv = spd_inverse(b);
  const LowRankBatch batch = random_batch(b_inv, 4, 4, rng);
  EXPECT_LE(relative_frobenius_error(chain_sherman_morrison(b_inv, batch),
                                     assembled_inverse(b, batch)),
            1e-10);
}

TEST(ChainShermanMorrison, IntermediateSingularity) {
  // Removing e_1 first hits a singular intermediate even though adding it
  // back afterwards would restore the identity.
  LowRankBatch batch(Matrix(2, 2), {-1, +1});
  batch.column(0)[0] = 1.0;
  batch.column(1)[0] = 1.0;
  try {
    chain_sherman_morrison(SymMatrix::identity(2), batch);
    FAIL() << "expected IntermediateSingularityError";
  } catch (const IntermediateSingularityError& e) {
    EXPECT_EQ(e.column(), 0u);
  }
}

TEST(SolveIndefinite, Diagonal) {
  const double d[] = {2.0, -1.0};
  Matrix rhs(2, 1);
  rhs(0, 0) = 2.0;
  rhs(1, 0) = 1.0;
  const Matrix x = solve_indefinite(SymMatrix::diagonal(d), rhs);
  EXPECT_DOUBLE_EQ(x(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(x(1, 0), -1.0);
}

TEST(SolveIndefinite, Identity) {
  oracle::CounterRng rng(1);
  const Matrix rhs = random_matrix(4, 3, rng);
  const Matrix x = solve_indefinite(SymMatrix::identity(4), rhs);
  EXPECT_EQ(relative_frobenius_error(x, rhs), 0.0);
}

TEST(SolveIndefinite, ZeroDiagonalNeedsTwoByTwoPivot) {
  Matrix s(2, 2);
  s(0, 1) = s(1, 0) = 1.0;
  Matrix rhs(2, 1);
  rhs(0, 0) = 3.0;
  rhs(1, 0) = 5.0;
  const IndefiniteFactorization fac(SymMatrix::from(s));
  const Matrix x = fac.solve(rhs);
  EXPECT_DOUBLE_EQ(x(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(x(1, 0), 3.0);
  EXPECT_EQ(fac.negative_count(), 1u);
}

TEST(SolveIndefinite, RandomResidualsProperty) {
  oracle::CounterRng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 30);
    SymMatrix s = random_symmetric(n, rng);
    if (trial % 3 == 0) {
      // zero diagonal forces 2x2 pivots
      Matrix m = s.full();
      for (std::size_t i = 0; i < n; ++i) m(i, i) = 0.0;
      if (n == 1) m(0, 0) = 1.0;
      s = SymMatrix::from(m);
    }
    const Matrix rhs = random_matrix(n, 2, rng);
    const Matrix x = solve_indefinite(s, rhs);
    const double cond = condition_number(s);
    if (cond > 1e6) continue;
    const Matrix residual = s.full() * x - rhs;
    ASSERT_LE(frobenius_norm(residual), 1e-10 * frobenius_norm(rhs)) << "trial " << trial;
  }
}

TEST(SolveIndefinite, InertiaMatchesEigenvalues) {
  oracle::CounterRng rng(78);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix s = random_symmetric(8, rng);
    const IndefiniteFactorization fac(s);
    std::size_t negatives = 0;
    for (double v : symmetric_eigenvalues(s)) negatives += v < 0.0 ? 1 : 0;
    EXPECT_EQ(fac.negative_count(), negatives);
  }
}

TEST(SolveIndefinite, SingularThrows) {
  Matrix s(3, 3, 1.0);  // rank one
  EXPECT_THROW(IndefiniteFactorization{SymMatrix::from(s)}, SingularUpdateError);
  EXPECT_THROW(IndefiniteFactorization{SymMatrix(2)}, SingularUpdateError);
}

TEST(SpdInverse, Diagonal) {
  const double d[] = {4.0, 9.0};
  const auto inv = spd_inverse(SymMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(inv(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(inv(1, 1), 1.0 / 9.0);
  EXPECT_EQ(inv(0, 1), 0.0);
  const auto eye = spd_inverse(SymMatrix::identity(6));
  EXPECT_EQ(relative_frobenius_error(eye.full(), Matrix::identity(6)), 0.0);
}

TEST(SpdInverse, HilbertClosedForm) {
  Matrix h(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  const double expected[4][4] = {{16, -120, 240, -140},
                                 {-120, 1200, -2700, 1680},
                                 {240, -2700, 6480, -4200},
                                 {-140, 1680, -4200, 2800}};
  const auto inv = spd_inverse(SymMatrix::from(h));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(inv(i, j) / expected[i][j], 1.0, 1e-6) << i << "," << j;
}

TEST(SpdInverse, IllConditionedResidual) {
  oracle::CounterRng rng(31);
  for (double cond : {1e4, 1e8, 1e10}) {
    const auto [b, b_inv] = oracle::conditioned_spd(20, cond, rng);
    const auto a = SymMatrix::from(b);
    const auto inv = spd_inverse(a);
    const Matrix residual = a.full() * inv.full() - Matrix::identity(20);
    // Backward-stable inversion leaves a residual of order cond * eps.
    EXPECT_LE(inf_norm(residual), 50.0 * cond * 2.2e-16) << "cond " << cond;
  }
}

TEST(SpdInverse, RejectsIndefinite) {
  const double d[] = {1.0, -1.0};
  EXPECT_THROW(spd_inverse(SymMatrix::diagonal(d)), NotPositiveDefiniteError);
  EXPECT_THROW(spd_inverse(SymMatrix::from(Matrix(3, 3, 1.0))), NotPositiveDefiniteError);
}

TEST(ConditionNumber, KnownValues) {
  EXPECT_DOUBLE_EQ(condition_number(SymMatrix::identity(5)), 1.0);
  const double d1[] = {10.0, 1.0};
  EXPECT_DOUBLE_EQ(condition_number(SymMatrix::diagonal(d1)), 10.0);
  const double d2[] = {1.0, 1e-12};
  EXPECT_NEAR(condition_number(SymMatrix::diagonal(d2)) / 1e12, 1.0, 1e-12);
  const double d3[] = {1.0, 0.0};
  EXPECT_TRUE(std::isinf(condition_number(SymMatrix::diagonal(d3))));
  const double d4[] = {-4.0, 2.0};
  EXPECT_DOUBLE_EQ(condition_number(SymMatrix::diagonal(d4)), 2.0);
}

// Bisection on the inertia of A - sigma I (unpivoted LDL^T in long double).
std::size_t count_below(const SymMatrix& a, long double sigma) {
  const std::size_t n = a.order();
  std::vector<long double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j) - (i == j ? sigma : 0.0L);
  std::size_t below = 0;
  for (std::size_t k = 0; k < n; ++k) {
    long double d = m[k * n + k];
    if (d == 0.0L) d = 1e-30L;
    if (d < 0.0L) ++below;
    for (std::size_t i = k + 1; i < n; ++i) {
      const long double l = m[i * n + k] / d;
      for (std::size_t j = k + 1; j < n; ++j) m[i * n + j] -= l * m[k * n + j];
    }
  }
  return below;
}

TEST(JacobiEigenvalues, MatchBisectionOracle) {
  oracle::CounterRng rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 10);
    const SymMatrix a = random_symmetric(n, rng);
    const auto ev = symmetric_eigenvalues(a);
    const long double bound = inf_norm(a.full()) + 1.0;
    double scale = 0.0;
    for (double v : ev) scale = std::max(scale, std::abs(v));
    for (std::size_t idx = 0; idx < n; ++idx) {
      long double lo = -bound;
      long double hi = bound;
      for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (count_below(a, mid) > idx) hi = mid; else lo = mid;
      }
      const double root = static_cast<double>(0.5L * (lo + hi));
      ASSERT_NEAR(ev[idx], root, 1e-8 * scale) << "trial " << trial << " eig " << idx;
    }
  }
}

}  // namespace
}  // namespace swrls
