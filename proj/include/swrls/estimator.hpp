// SPDX-License-Identifier: Apache-2.0
#pragma once

// Sliding-window recursive least squares with a low-rank information-matrix
// update per step:
//
//   A_k     = lambda A_{k-1} + Q_k D Q_k^T
//   S       = lambda D + Q_k^T Gamma_{k-1} Q_k
//   theta_k = theta_{k-1} - Gamma_{k-1} Q_k S^{-1} (Q_k^T theta_{k-1} - y~_k)
//   Gamma_k = (Gamma_{k-1} - Gamma_{k-1} Q_k S^{-1} Q_k^T Gamma_{k-1}) / lambda
//
// The columns of Q_k, their signs D and the augmented outputs y~_k come from
// the profile's UpdateTemplate.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swrls/densela.hpp"
#include "swrls/profile.hpp"
#include "swrls/regressor.hpp"
#include "swrls/ring_buffer.hpp"

namespace swrls {

struct EstimatorOptions {
  /// Diagonal loading used only when the initial information matrix is not
  /// positive definite. 0 disables the fallback.
  double diagonal_loading = 0.0;
  /// Rebuild Gamma and theta from the explicit window sums every this many
  /// steps. 0 disables.
  std::size_t reinit_period = 0;
};

/// Q_k, D and y~_k for one step.
struct UpdateBatchStep {
  LowRankBatch batch;
  std::vector<double> y_aug;
};

struct ForecastPoint {
  std::int64_t k;
  double mean;
  double lower;
  double upper;
};

struct ForecastBand {
  std::vector<ForecastPoint> points;
  double sigma;
};

class Estimator {
 public:
  /// Batch initialization over the first window. A finite-window profile
  /// needs exactly w consecutive samples; the unbounded profile accepts any
  /// number >= dimension. Throws WindowTooSmallError, IndexGapError,
  /// NotPositiveDefiniteError.
  static Estimator init(ForgettingProfile profile, HarmonicModel model,
                        std::span<const Sample> samples, EstimatorOptions options = {});

  /// Advances to sample.k == k() + 1. Throws IndexGapError or
  /// SingularUpdateError (message names the failing index).
  void step(const Sample& sample);

  /// Q_k, D and y~_k for the next sample, without changing state.
  UpdateBatchStep build_update(const Sample& next) const;

  std::int64_t k() const noexcept { return k_; }
  const std::vector<double>& theta() const noexcept { return theta_; }
  const SymMatrix& gamma() const noexcept { return gamma_; }
  const ForgettingProfile& profile() const noexcept { return profile_; }
  const HarmonicModel& model() const noexcept { return model_; }
  /// Window length used for the information matrix of a finite profile and
  /// for the residual buffer (the initial length for the unbounded profile).
  std::size_t window() const noexcept { return window_; }
  bool loading_applied() const noexcept { return loading_applied_; }
  std::size_t reinit_count() const noexcept { return reinit_count_; }
  /// Relative asymmetry of Gamma before the last re-symmetrization.
  double last_asymmetry() const noexcept { return last_asymmetry_; }

  /// y_k - phi_k^T theta_k for the sample at the current index.
  double approximation_residual(const Sample& current) const;
  /// y_{k+1} - phi_{k+1}^T theta_k for the next sample, before step().
  double prediction_residual(const Sample& next) const;

  /// Mean square of the buffered first-harmonic residuals.
  /// Throws InsufficientDataError with fewer than two entries.
  double moving_variance() const;

  /// First-harmonic mean with a constant +-3 sigma band for k+1..k+horizon.
  ForecastBand forecast(std::size_t horizon) const;

  /// A_k assembled directly from the buffered samples and the weight law.
  SymMatrix info_matrix() const;

 private:
  Estimator(ForgettingProfile profile, HarmonicModel model, EstimatorOptions options,
            std::size_t window, std::size_t history);

  /// Number of past samples (lags 0..) that carry weight at index k_.
  std::size_t active_lags() const noexcept;
  std::vector<double> weighted_rhs() const;
  void rebuild_from_window();
  void push_first_harmonic_residual(std::int64_t k, double y);

  ForgettingProfile profile_;
  HarmonicModel model_;
  UpdateTemplate template_;
  EstimatorOptions options_;
  std::size_t window_;

  SymMatrix gamma_;
  std::vector<double> theta_;
  RingBuffer<double> history_;    // y values, newest = index k_
  RingBuffer<double> residuals_;  // first-harmonic residuals
  std::int64_t k_ = 0;
  std::int64_t first_k_ = 0;
  std::size_t steps_since_reinit_ = 0;
  std::size_t reinit_count_ = 0;
  bool loading_applied_ = false;
  double last_asymmetry_ = 0.0;
};

/// Lags beyond which lambda^j < 1e-18; bounds the history kept for the
/// unbounded profile.
std::size_t truncation_horizon(double lambda) noexcept;

}  // namespace swrls
