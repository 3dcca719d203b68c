// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "swrls/error.hpp"
#include "swrls/estimator.hpp"
#include "swrls/oracle.hpp"

namespace swrls {
namespace {

ForgettingProfile default_profile() { return SegmentedProfile::make(0.89, 0.99, 250, 1, 400); }

std::vector<double> random_theta(std::size_t n, std::uint64_t seed) {
  oracle::CounterRng rng(seed);
  std::vector<double> theta(n);
  for (auto& t : theta) t = rng.normal();
  return theta;
}

std::vector<Sample> synth(const HarmonicModel& model, std::vector<double> theta, double sigma,
                          std::size_t length, std::uint64_t seed) {
  return oracle::synth_generate({model, std::move(theta), sigma, seed, length});
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

std::span<const Sample> head(const std::vector<Sample>& s, std::size_t n) {
  return std::span<const Sample>(s).first(n);
}

TEST(EstimatorInit, NoiselessRecovery) {
  const auto model = HarmonicModel::make(365.25, 16);
  const auto theta = random_theta(model.dimension(), 1);
  const auto data = synth(model, theta, 0.0, 400, 2);
  const auto est = Estimator::init(default_profile(), model, data);
  EXPECT_EQ(est.k(), 400);
  EXPECT_LE(relative_error(est.theta(), theta), 1e-8);
}

TEST(EstimatorInit, WindowSmallerThanModel) {
  const auto model = HarmonicModel::make(365.25, 16);
  const auto data = synth(model, random_theta(35, 1), 0.0, 34, 2);
  EXPECT_THROW(Estimator::init(ExponentialProfile::finite(0.99, 34), model, data),
               WindowTooSmallError);
  EXPECT_THROW(Estimator::init(ExponentialProfile::unbounded(0.99), model, data),
               WindowTooSmallError);
}

TEST(EstimatorInit, WrongSampleCount) {
  const auto model = HarmonicModel::make(365.25, 2);
  const auto data = synth(model, random_theta(7, 1), 0.0, 50, 2);
  EXPECT_THROW(Estimator::init(ExponentialProfile::finite(0.99, 40), model, data), WindowError);
}

TEST(EstimatorInit, RejectsIndexGap) {
  const auto model = HarmonicModel::make(365.25, 0);
  auto data = synth(model, {1.0, 2.0, 3.0}, 0.0, 10, 2);
  data[5].k += 1;
  EXPECT_THROW(Estimator::init(ExponentialProfile::finite(0.9, 10), model, data), IndexGapError);
}

// A very long period makes the sine regressor vanish to working precision
// over a three-sample window, so A_w has no usable third direction.
TEST(EstimatorInit, DeficientExcitation) {
  const auto model = HarmonicModel::make(1e9, 0);
  const auto data = synth(model, {1.0, 1.0, 1.0}, 0.0, 3, 2);
  EXPECT_THROW(Estimator::init(ExponentialProfile::finite(0.9, 3), model, data),
               NotPositiveDefiniteError);

  const auto loaded = Estimator::init(ExponentialProfile::finite(0.9, 3), model, data,
                                      EstimatorOptions{.diagonal_loading = 1e-6});
  EXPECT_TRUE(loaded.loading_applied());
  for (double t : loaded.theta()) EXPECT_TRUE(std::isfinite(t));
}

TEST(EstimatorInit, LoadingUnusedWhenWellPosed) {
  const auto model = HarmonicModel::make(365.25, 2);
  const auto data = synth(model, random_theta(7, 3), 0.1, 100, 4);
  const auto est = Estimator::init(ExponentialProfile::finite(0.99, 100), model, data,
                                   EstimatorOptions{.diagonal_loading = 1e-3});
  EXPECT_FALSE(est.loading_applied());
}

TEST(EstimatorInit, GammaInvertsInfoMatrix) {
  const auto model = HarmonicModel::make(365.25, 16);
  const auto data = synth(model, random_theta(35, 5), 1.0, 400, 6);
  const auto est = Estimator::init(default_profile(), model, data);
  EXPECT_LE(relative_frobenius_error(spd_inverse(est.info_matrix()).full(), est.gamma().full()),
            1e-10);
}

TEST(EstimatorStep, FixedPointOnNoiselessData) {
  const auto model = HarmonicModel::make(365.25, 16);
  const auto theta = random_theta(35, 7);
  const auto data = synth(model, theta, 0.0, 700, 8);
  auto est = Estimator::init(default_profile(), model, head(data, 400));
  for (std::size_t i = 400; i < data.size(); ++i) {
    est.step(data[i]);
    ASSERT_LE(relative_error(est.theta(), theta), 1e-8) << "k = " << data[i].k;
  }
}

TEST(EstimatorStep, GammaTracksInverseOfInfoMatrix) {
  const auto model = HarmonicModel::make(365.25, 16);
  const auto data = synth(model, random_theta(35, 9), 1.0, 1000, 10);
  for (const ForgettingProfile& profile :
       {default_profile(), ForgettingProfile(ExponentialProfile::finite(0.99, 400))}) {
    auto est = Estimator::init(profile, model, head(data, 400));
    for (std::size_t i = 400; i < data.size(); ++i) {
      est.step(data[i]);
      ASSERT_LE(est.last_asymmetry(), 1e-12);
      if (i % 100 != 0) continue;
      const SymMatrix a = est.info_matrix();
      ASSERT_LE(relative_frobenius_error(est.gamma().full(), spd_inverse(a).full()), 1e-6);
      const Matrix residual = est.gamma().full() * a.full() - Matrix::identity(35);
      ASSERT_LE(inf_norm(residual), 1e-6) << profile.describe() << " k = " << est.k();
    }
  }
}

TEST(EstimatorStep, UnboundedProfileMatchesClassicalRls) {
  // Rank-one update path: A_k = lambda A_{k-1} + phi phi^T.
  const auto model = HarmonicModel::make(50.0, 2);
  const auto data = synth(model, random_theta(7, 11), 0.5, 300, 12);
  auto est = Estimator::init(ExponentialProfile::unbounded(0.97), model, head(data, 28));
  SymMatrix p = est.gamma();
  std::vector<double> theta = est.theta();
  for (std::size_t i = 28; i < data.size(); ++i) {
    const auto phi = model.regressor_at(data[i].k);
    const auto pphi = p.full() * std::span<const double>(phi);
    const double denom = 0.97 + std::inner_product(phi.begin(), phi.end(), pphi.begin(), 0.0);
    const double err = data[i].y - model.predict(theta, data[i].k);
    for (std::size_t a = 0; a < 7; ++a) theta[a] += pphi[a] * err / denom;
    Matrix next = p.full();
    for (std::size_t a = 0; a < 7; ++a)
      for (std::size_t b = 0; b < 7; ++b) next(a, b) = (next(a, b) - pphi[a] * pphi[b] / denom) / 0.97;
    p = SymMatrix::from(next);
    est.step(data[i]);
  }
  EXPECT_LE(relative_error(est.theta(), theta), 1e-10);
  EXPECT_LE(relative_frobenius_error(est.gamma().full(), p.full()), 1e-10);
}

TEST(EstimatorStep, RejectsIndexGap) {
  const auto model = HarmonicModel::make(365.25, 1);
  const auto data = synth(model, random_theta(5, 1), 0.0, 60, 2);
  auto est = Estimator::init(ExponentialProfile::finite(0.95, 50), model, head(data, 50));
  EXPECT_THROW(est.step(data[51]), IndexGapError);
  EXPECT_THROW(est.step(data[49]), IndexGapError);
  EXPECT_NO_THROW(est.step(data[50]));
}

TEST(EstimatorStep, ReinitKeepsTrajectory) {
  const auto model = HarmonicModel::make(365.25, 16);
  const auto data = synth(model, random_theta(35, 13), 1.0, 600, 14);
  auto plain = Estimator::init(default_profile(), model, head(data, 400));
  auto reinit = Estimator::init(default_profile(), model, head(data, 400),
                                EstimatorOptions{.reinit_period = 50});
  for (std::size_t i = 400; i < data.size(); ++i) {
    plain.step(data[i]);
    reinit.step(data[i]);
  }
  EXPECT_EQ(reinit.reinit_count(), 4u);
  EXPECT_EQ(plain.reinit_count(), 0u);
  EXPECT_LE(relative_error(reinit.theta(), plain.theta()), 1e-8);
}

TEST(EstimatorResidual, Variants) {
  const auto model = HarmonicModel::make(50.0, 3);
  const auto theta = random_theta(9, 15);
  const auto data = synth(model, theta, 0.0, 120, 16);
  auto est = Estimator::init(ExponentialProfile::finite(0.98, 100), model, head(data, 100));
  EXPECT_NEAR(est.approximation_residual(data[99]), 0.0, 1e-8);
  EXPECT_NEAR(est.prediction_residual(data[100]), 0.0, 1e-8);
  EXPECT_THROW(est.approximation_residual(data[100]), IndexGapError);
  EXPECT_THROW(est.prediction_residual(data[99]), IndexGapError);
}

TEST(EstimatorResidual, ZeroParametersGiveRawObservation) {
  const auto model = HarmonicModel::make(365.25, 0);
  const auto data = synth(model, {0.0, 0.0, 0.0}, 1.0, 30, 17);
  const auto est = Estimator::init(ExponentialProfile::finite(0.9, 30), model, data);
  // The fit on pure noise is not exactly zero, so compare through predict.
  const Sample s = data.back();
  EXPECT_DOUBLE_EQ(est.approximation_residual(s), s.y - model.predict(est.theta(), s.k));
}

TEST(EstimatorResidual, NoisyPredictionResidualMatchesSigma) {
  const auto model = HarmonicModel::make(365.25, 16);
  const double sigma = 0.7;
  const auto data = synth(model, random_theta(35, 18), sigma, 2400, 19);
  auto est = Estimator::init(ExponentialProfile::finite(0.999, 400), model, head(data, 400));
  double sq = 0.0;
  for (std::size_t i = 400; i < data.size(); ++i) {
    const double r = est.prediction_residual(data[i]);
    sq += r * r;
    est.step(data[i]);
  }
  const double sd = std::sqrt(sq / 2000.0);
  EXPECT_NEAR(sd / sigma, 1.0, 0.15);
}

TEST(EstimatorVariance, ZeroResiduals) {
  const auto model = HarmonicModel::make(365.25, 0);
  const auto data = synth(model, {2.0, 1.0, -1.0}, 0.0, 40, 1);
  const auto est = Estimator::init(ExponentialProfile::finite(0.95, 40), model, data);
  EXPECT_NEAR(est.moving_variance(), 0.0, 1e-20);
}

// With period 4 and one harmonic the Nyquist sequence (-1)^k is orthogonal
// to the regressors only under uniform weights; lambda close to 1 makes the
// fit leave it almost entirely in the residuals.
Estimator alternating_fit() {
  const auto model = HarmonicModel::make(4.0, 0);
  std::vector<Sample> data;
  for (std::int64_t k = 1; k <= 400; ++k) data.push_back({k, 5.0 + (k % 2 == 0 ? 1.0 : -1.0)});
  return Estimator::init(ExponentialProfile::finite(1.0 - 1e-9, 400), model, data);
}

TEST(EstimatorVariance, AlternatingResiduals) {
  const auto est = alternating_fit();
  EXPECT_NEAR(est.moving_variance(), 1.0, 1e-6);
}

TEST(EstimatorVariance, ExcludedHarmonicPowerPlusNoise) {
  const auto model = HarmonicModel::make(365.25, 16);
  std::vector<double> theta(35, 0.0);
  theta[0] = 6.0;
  theta[1] = 10.0;
  theta[4] = 2.0;   // a_1
  theta[9] = 1.5;   // b_3
  const double sigma = 1.0;
  const double expected = (2.0 * 2.0 + 1.5 * 1.5) / 2.0 + sigma * sigma;
  const auto data = synth(model, theta, sigma, 1500, 20);
  auto est = Estimator::init(default_profile(), model, head(data, 400));
  for (std::size_t i = 400; i < data.size(); ++i) est.step(data[i]);
  EXPECT_NEAR(est.moving_variance() / expected, 1.0, 0.2);
}

TEST(EstimatorVariance, NeedsTwoResiduals) {
  const auto model = HarmonicModel::make(3.0, 0);
  const std::vector<Sample> data = {{1, 1.0}, {2, 2.0}, {3, 0.5}};
  auto est = Estimator::init(ExponentialProfile::finite(0.9, 3), model, data);
  EXPECT_NO_THROW(est.moving_variance());
}

TEST(EstimatorForecast, ConstantBand) {
  const auto est = alternating_fit();
  const auto band = est.forecast(3);
  ASSERT_EQ(band.points.size(), 3u);
  EXPECT_NEAR(band.sigma, 1.0, 1e-6);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto& pt = band.points[t];
    EXPECT_EQ(pt.k, 401 + static_cast<std::int64_t>(t));
    EXPECT_NEAR(pt.mean, 5.0, 1e-6);
    EXPECT_NEAR(pt.lower, 2.0, 1e-5);
    EXPECT_NEAR(pt.upper, 8.0, 1e-5);
    EXPECT_DOUBLE_EQ(pt.upper - pt.mean, 3.0 * band.sigma);
  }
  EXPECT_THROW(est.forecast(0), RangeError);
}

TEST(EstimatorForecast, NoiselessFirstHarmonic) {
  const auto model = HarmonicModel::make(365.25, 16);
  std::vector<double> theta(35, 0.0);
  theta[0] = 6.0;
  theta[1] = -9.0;
  theta[2] = 3.0;
  const auto data = synth(model, theta, 0.0, 430, 21);
  auto est = Estimator::init(default_profile(), model, head(data, 400));
  const auto band = est.forecast(30);
  ASSERT_EQ(band.points.size(), 30u);
  EXPECT_LE(band.sigma, 1e-7);
  for (std::size_t t = 0; t < 30; ++t) {
    EXPECT_EQ(band.points[t].k, data[400 + t].k);
    EXPECT_NEAR(band.points[t].mean, data[400 + t].y, 1e-7);
  }
}

// Assembled directly so that nearly singular profiles still yield a number.
double info_condition(const ForgettingProfile& profile, const HarmonicModel& model,
                      std::int64_t k, std::size_t w) {
  SymMatrix a(model.dimension());
  for (std::size_t j = 0; j < w; ++j)
    a.add_outer(profile.weight(j), model.regressor_at(k - static_cast<std::int64_t>(j)));
  return condition_number(a);
}

double gamma_trace(const ForgettingProfile& profile, const HarmonicModel& model, std::int64_t k,
                   std::size_t w) {
  SymMatrix a(model.dimension());
  for (std::size_t j = 0; j < w; ++j)
    a.add_outer(profile.weight(j), model.regressor_at(k - static_cast<std::int64_t>(j)));
  double trace = 0.0;
  for (double ev : symmetric_eigenvalues(a)) trace += 1.0 / std::abs(ev);
  return trace;
}

TEST(EstimatorDiagnostics, ConditionNumberOrdering) {
  const auto model = HarmonicModel::make(365.25, 16);
  const ForgettingProfile segmented = default_profile();
  const ForgettingProfile fast = ExponentialProfile::finite(0.89, 400);
  const ForgettingProfile slow = ExponentialProfile::finite(0.99, 400);
  for (std::int64_t k : {400, 650, 1000, 3000}) {
    const double c_seg = info_condition(segmented, model, k, 400);
    EXPECT_LT(c_seg, info_condition(fast, model, k, 400)) << k;
    EXPECT_GT(c_seg, info_condition(slow, model, k, 400)) << k;
    EXPECT_LT(gamma_trace(segmented, model, k, 400), gamma_trace(fast, model, k, 400)) << k;
  }
}

TEST(EstimatorDiagnostics, InfoMatrixMatchesOracleAssembly) {
  const auto model = HarmonicModel::make(365.25, 4);
  const auto data = synth(model, random_theta(11, 22), 1.0, 500, 23);
  auto est = Estimator::init(default_profile(), model, head(data, 400));
  for (std::size_t i = 400; i < 450; ++i) est.step(data[i]);
  const auto ref = oracle::direct_weighted_ls(default_profile(), model, data, est.k());
  EXPECT_LE(relative_frobenius_error(est.info_matrix().full(), ref.info.full()), 1e-13);
}

}  // namespace
}  // namespace swrls
