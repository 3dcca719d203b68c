// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force references for the recursive estimator and the low-rank
// updates, plus seeded synthetic data. Nothing here goes through the
// estimator's update path or the densela factorizations: assembly, solves
// and inverses are done separately in long double.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swrls/estimator.hpp"
#include "swrls/matrix.hpp"
#include "swrls/profile.hpp"
#include "swrls/regressor.hpp"

namespace swrls::oracle {

/// SplitMix64 evaluated at (seed, counter): the n-th draw depends only on the
/// seed and n, never on platform RNG implementations.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

/// Derives an independent seed for sub-stream `index` (per-trial seeds).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

struct SyntheticSpec {
  HarmonicModel model;
  std::vector<double> theta_star;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::size_t length = 0;
  std::int64_t first_index = 1;
};

/// y_k = phi_k^T theta* + sigma * g_k, k = first_index .. first_index + length - 1.
std::vector<Sample> synth_generate(const SyntheticSpec& spec);

struct WeightedLsSolution {
  SymMatrix info;
  std::vector<double> theta;
};

/// Explicit weighted least squares at index k:
///   A_k = sum_j f(j) phi_{k-j} phi_{k-j}^T,  b_k = sum_j f(j) phi_{k-j} y_{k-j}
/// over every lag with data and nonzero weight (lags where the unbounded
/// profile's weight drops under 1e-18 are truncated). `samples` must be
/// consecutive and contain index k. Throws NotPositiveDefiniteError.
WeightedLsSolution direct_weighted_ls(const ForgettingProfile& profile,
                                      const HarmonicModel& model,
                                      std::span<const Sample> samples, std::int64_t k);

/// As direct_weighted_ls, accumulating the lag sum in the order given by
/// `lag_order` (a permutation of the contributing lags).
WeightedLsSolution direct_weighted_ls_ordered(const ForgettingProfile& profile,
                                              const HarmonicModel& model,
                                              std::span<const Sample> samples, std::int64_t k,
                                              std::span<const std::size_t> lag_order);

/// Lags contributing at index k for the given sample span.
std::size_t contributing_lags(const ForgettingProfile& profile, std::span<const Sample> samples,
                              std::int64_t k);

/// Gauss-Jordan inverse with partial pivoting in long double.
/// Throws SingularUpdateError on a zero pivot.
Matrix direct_inverse(const Matrix& a);

struct TrajectoryReport {
  std::vector<std::int64_t> index;
  std::vector<double> theta_deviation;  // ||theta_rec - theta_ref|| / ||theta_ref||
  std::vector<double> gamma_deviation;  // relative Frobenius vs inverse of A_ref
  std::vector<double> condition;        // cond(A_ref), sampled every cond_every steps
  double max_theta_deviation = 0.0;
  double max_gamma_deviation = 0.0;
  std::int64_t worst_theta_index = 0;
  std::int64_t worst_gamma_index = 0;
};

struct TrajectoryOptions {
  /// Samples used by init for the unbounded profile (finite profiles use w).
  std::size_t init_length = 0;
  /// Record cond(A) every this many steps; 0 disables.
  std::size_t cond_every = 0;
  EstimatorOptions estimator;
};

/// Runs init + step over `samples` and checks every index against
/// direct_weighted_ls. Needs at least window + 10 samples.
TrajectoryReport compare_trajectory(const ForgettingProfile& profile, const HarmonicModel& model,
                                    std::span<const Sample> samples,
                                    const TrajectoryOptions& options = {});

struct BiasReport {
  std::vector<double> mean_bias;       // mean(theta_k) - theta*
  std::vector<double> standard_error;  // sample std / sqrt(trials)
  std::size_t trials = 0;
  /// max_i |mean_bias_i| / standard_error_i (0 where the error is 0).
  double max_z = 0.0;
};

/// Independent noise realizations of `spec` (seed derived per trial), each
/// run through init + step up to index k. Throws RangeError for trials < 100.
BiasReport monte_carlo_bias(const ForgettingProfile& profile, const SyntheticSpec& spec,
                            std::size_t trials, std::int64_t k,
                            const TrajectoryOptions& options = {});

struct AccumulationReport {
  std::vector<double> batch_error;  // per trial, relative Frobenius vs direct inverse
  std::vector<double> chain_error;  // NaN where the chain hit a singular step
  std::vector<double> batch_asymmetry;  // before re-symmetrization
  std::vector<double> chain_asymmetry;
  double median_batch_error = 0.0;
  double median_chain_error = 0.0;
  double median_batch_asymmetry = 0.0;
  double median_chain_asymmetry = 0.0;
  std::size_t singular_incidents = 0;
};

/// Symmetric matrix with log-spaced eigenvalues in [1, cond] conjugated by a
/// seeded random orthogonal matrix; returns (B, B^{-1}) built in long double.
std::pair<Matrix, Matrix> conditioned_spd(std::size_t n, double cond, CounterRng& rng);

/// Per trial: builds B with cond(B) ~ cond_target and `columns` alternating
/// +1/-1 columns drawn with covariance B (removals sized so A stays positive
/// definite), applies them through batch_inverse_update and
/// chain_sherman_morrison and measures both against inv(inv(B^{-1}) + Q D Q^T)
/// evaluated in extended precision from the same double inputs.
AccumulationReport accumulation_experiment(std::size_t n, std::size_t columns,
                                           double cond_target, std::size_t trials,
                                           std::uint64_t seed);

double median(std::vector<double> values);

}  // namespace swrls::oracle
