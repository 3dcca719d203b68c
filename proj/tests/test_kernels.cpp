// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "swrls/estimator.hpp"
#include "swrls/kernels.hpp"
#include "swrls/oracle.hpp"

namespace swrls {
namespace {

using kernels::Isa;

class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : saved_(kernels::active().isa) { kernels::select(isa); }
  ~ScopedIsa() { kernels::select(saved_); }

 private:
  Isa saved_;
};

std::vector<double> random_vector(std::size_t n, oracle::CounterRng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

const kernels::KernelTable* simd_or_skip() {
  if (!kernels::cpu_supports(Isa::avx2)) return nullptr;
  return kernels::avx2_table();
}

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(kernels::cpu_supports(Isa::scalar));
  EXPECT_EQ(kernels::scalar_table().isa, Isa::scalar);
  EXPECT_EQ(kernels::name(Isa::avx2), "avx2");
}

TEST(Kernels, SelectRejectsUnavailable) {
  if (kernels::cpu_supports(Isa::avx2)) GTEST_SKIP() << "AVX2 present";
  EXPECT_THROW(kernels::select(Isa::avx2), std::invalid_argument);
}

TEST(Kernels, Avx2MatchesScalarDot) {
  const auto* simd = simd_or_skip();
  if (simd == nullptr) GTEST_SKIP() << "AVX2 not available";
  oracle::CounterRng rng(1);
  const auto& ref = kernels::scalar_table();
  for (std::size_t n = 0; n <= 131; ++n) {
    const auto a = random_vector(n, rng);
    const auto b = random_vector(n, rng);
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(a[i] * b[i]);
    const double expected = ref.dot(a.data(), b.data(), n);
    const double got = simd->dot(a.data(), b.data(), n);
    ASSERT_NEAR(got, expected, 4.0 * static_cast<double>(n + 1) * 1.2e-16 * abs_sum) << "n=" << n;
  }
}

TEST(Kernels, Avx2MatchesScalarAxpyAndScale) {
  const auto* simd = simd_or_skip();
  if (simd == nullptr) GTEST_SKIP() << "AVX2 not available";
  oracle::CounterRng rng(2);
  const auto& ref = kernels::scalar_table();
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto x = random_vector(n, rng);
    auto y_ref = random_vector(n, rng);
    auto y_simd = y_ref;
    const double alpha = rng.normal();
    ref.axpy(alpha, x.data(), y_ref.data(), n);
    simd->axpy(alpha, x.data(), y_simd.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      // FMA rounds once, the scalar path twice.
      ASSERT_NEAR(y_simd[i], y_ref[i], 4e-16 * (std::abs(alpha * x[i]) + std::abs(y_ref[i])));
    }
    // A lone multiply rounds identically on both paths.
    y_simd = y_ref;
    ref.scale(alpha, y_ref.data(), n);
    simd->scale(alpha, y_simd.data(), n);
    ASSERT_EQ(y_simd, y_ref);
  }
}

TEST(Kernels, AxpyLeavesTailUntouchedBeyondLength) {
  const auto* simd = simd_or_skip();
  if (simd == nullptr) GTEST_SKIP() << "AVX2 not available";
  std::vector<double> x(16, 1.0);
  std::vector<double> y(16, 0.0);
  simd->axpy(2.0, x.data(), y.data(), 7);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(y[i], 2.0);
  for (std::size_t i = 7; i < 16; ++i) EXPECT_EQ(y[i], 0.0);
}

// The whole recursion agrees across kernel variants.
TEST(Kernels, EstimatorTrajectoryIndependentOfVariant) {
  if (!kernels::cpu_supports(Isa::avx2)) GTEST_SKIP() << "AVX2 not available";
  const auto model = HarmonicModel::make(365.25, 16);
  std::vector<double> theta(model.dimension(), 0.5);
  theta[0] = 6.0;
  const auto samples = oracle::synth_generate({model, theta, 2.0, 5, 600, 1});
  const ForgettingProfile profile = SegmentedProfile::make(0.89, 0.99, 250, 1, 400);

  auto run = [&](Isa isa) {
    ScopedIsa scoped(isa);
    auto est = Estimator::init(profile, model, std::span(samples).first(400));
    for (std::size_t i = 400; i < samples.size(); ++i) est.step(samples[i]);
    return est.theta();
  };
  const auto a = run(Isa::scalar);
  const auto b = run(Isa::avx2);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10 * (1.0 + std::abs(a[i])));
}

}  // namespace
}  // namespace swrls
