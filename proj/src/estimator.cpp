// SPDX-License-Identifier: Apache-2.0
#include "swrls/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "swrls/error.hpp"
#include "swrls/kernels.hpp"

namespace swrls {

std::size_t truncation_horizon(double lambda) noexcept {
  return static_cast<std::size_t>(std::ceil(std::log(1e-18) / std::log(lambda)));
}

Estimator::Estimator(ForgettingProfile profile, HarmonicModel model, EstimatorOptions options,
                     std::size_t window, std::size_t history)
    : profile_(std::move(profile)),
      model_(std::move(model)),
      template_(profile_.update_template()),
      options_(options),
      window_(window),
      gamma_(model_.dimension()),
      theta_(model_.dimension(), 0.0),
      history_(history),
      residuals_(window) {}

Estimator Estimator::init(ForgettingProfile profile, HarmonicModel model,
                          std::span<const Sample> samples, EstimatorOptions options) {
  const std::size_t n = model.dimension();
  std::size_t window = samples.size();
  std::size_t history = 0;
  if (const auto w = profile.window()) {
    if (*w < n) {
      throw WindowTooSmallError("window " + std::to_string(*w) + " is smaller than the " +
                                std::to_string(n) + " model parameters");
    }
    if (samples.size() != *w) {
      throw WindowError("initialization needs exactly w = " + std::to_string(*w) +
                        " samples, got " + std::to_string(samples.size()));
    }
    window = *w;
    history = *w + 1;
  } else {
    if (samples.size() < n) {
      throw WindowTooSmallError("initialization needs at least " + std::to_string(n) +
                                " samples, got " + std::to_string(samples.size()));
    }
    history = std::max(samples.size(), truncation_horizon(profile.decay())) + 1;
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].k != samples[i - 1].k + 1) {
      throw IndexGapError("initial samples are not consecutive at k = " +
                          std::to_string(samples[i].k));
    }
  }

  Estimator est(std::move(profile), std::move(model), options, window, history);
  for (const auto& s : samples) est.history_.push(s.y);
  est.first_k_ = samples.front().k;
  est.k_ = samples.back().k;
  est.rebuild_from_window();
  for (const auto& s : samples) est.push_first_harmonic_residual(s.k, s.y);
  return est;
}

std::size_t Estimator::active_lags() const noexcept {
  const auto available = static_cast<std::size_t>(k_ - first_k_ + 1);
  if (const auto w = profile_.window()) return std::min(*w, available);
  return std::min({available, history_.size(), truncation_horizon(profile_.decay())});
}

SymMatrix Estimator::info_matrix() const {
  SymMatrix a(model_.dimension());
  std::vector<double> phi(model_.dimension());
  const std::size_t lags = active_lags();
  for (std::size_t j = 0; j < lags; ++j) {
    model_.regressor_at(k_ - static_cast<std::int64_t>(j), phi);
    a.add_outer(profile_.weight(j), phi);
  }
  return a;
}

std::vector<double> Estimator::weighted_rhs() const {
  std::vector<double> b(model_.dimension(), 0.0);
  std::vector<double> phi(model_.dimension());
  const std::size_t lags = active_lags();
  for (std::size_t j = 0; j < lags; ++j) {
    model_.regressor_at(k_ - static_cast<std::int64_t>(j), phi);
    kernels::axpy(profile_.weight(j) * history_.newest(j), phi, b);
  }
  return b;
}

void Estimator::rebuild_from_window() {
  SymMatrix a = info_matrix();
  try {
    gamma_ = spd_inverse(a);
  } catch (const NotPositiveDefiniteError&) {
    if (!(options_.diagonal_loading > 0.0)) throw;
    a.add_diagonal(options_.diagonal_loading);
    gamma_ = spd_inverse(a);
    loading_applied_ = true;
  }
  const auto b = weighted_rhs();
  for (std::size_t i = 0; i < theta_.size(); ++i) theta_[i] = kernels::dot(gamma_.row(i), b);
}

void Estimator::push_first_harmonic_residual(std::int64_t k, double y) {
  residuals_.push(y - model_.predict_first_harmonic(theta_, k));
}

UpdateBatchStep Estimator::build_update(const Sample& next) const {
  if (next.k != k_ + 1) {
    throw IndexGapError("expected sample k = " + std::to_string(k_ + 1) + ", got " +
                        std::to_string(next.k));
  }
  const auto& entries = template_.entries();
  UpdateBatchStep u{LowRankBatch(model_.dimension(), entries.size()),
                    std::vector<double>(entries.size())};
  for (std::size_t l = 0; l < entries.size(); ++l) {
    const auto& e = entries[l];
    auto col = u.batch.column(l);
    model_.regressor_at(next.k - static_cast<std::int64_t>(e.lag), col);
    kernels::scale(e.scale, col);
    u.batch.set_sign(l, e.sign);
    // lag 0 is the incoming sample; lag j >= 1 sits j - 1 back in history.
    const double y = e.lag == 0 ? next.y : history_.newest(e.lag - 1);
    u.y_aug[l] = e.scale * y;
  }
  return u;
}

void Estimator::step(const Sample& sample) {
  const UpdateBatchStep u = build_update(sample);
  const LowRankBatch& q = u.batch;
  const std::size_t n = model_.dimension();
  const std::size_t r = q.rank();
  const double lambda = profile_.decay();

  // g = (Gamma_{k-1} Q)^T
  Matrix g(r, n);
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t i = 0; i < n; ++i) g(l, i) = kernels::dot(gamma_.row(i), q.column(l));

  Matrix s(r, r);
  std::vector<double> innovation(r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) s(a, b) = kernels::dot(q.column(a), g.row(b));
    s(a, a) += lambda * static_cast<double>(q.sign(a));
    innovation[a] = kernels::dot(q.column(a), theta_) - u.y_aug[a];
  }

  try {
    const IndefiniteFactorization fac(SymMatrix::from(s));
    fac.solve_in_place(innovation);
    for (std::size_t l = 0; l < r; ++l) kernels::axpy(-innovation[l], g.row(l), theta_);

    const Matrix x = fac.solve(g);
    Matrix next = gamma_.full();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = next.row(i);
      for (std::size_t l = 0; l < r; ++l) kernels::axpy(-g(l, i), x.row(l), row);
    }
    kernels::scale(1.0 / lambda, next.values());
    last_asymmetry_ = relative_asymmetry(next);
    gamma_ = symmetrized(std::move(next));
  } catch (const SingularUpdateError& e) {
    throw SingularUpdateError("update at k = " + std::to_string(sample.k) + ": " + e.what());
  }

  history_.push(sample.y);
  k_ = sample.k;
  if (options_.reinit_period > 0 && ++steps_since_reinit_ >= options_.reinit_period) {
    rebuild_from_window();
    steps_since_reinit_ = 0;
    ++reinit_count_;
  }
  push_first_harmonic_residual(sample.k, sample.y);
}

double Estimator::approximation_residual(const Sample& current) const {
  if (current.k != k_) {
    throw IndexGapError("approximation residual needs the sample at k = " + std::to_string(k_));
  }
  return current.y - model_.predict(theta_, current.k);
}

double Estimator::prediction_residual(const Sample& next) const {
  if (next.k != k_ + 1) {
    throw IndexGapError("prediction residual needs the sample at k = " + std::to_string(k_ + 1));
  }
  return next.y - model_.predict(theta_, next.k);
}

double Estimator::moving_variance() const {
  if (residuals_.size() < 2) {
    throw InsufficientDataError("moving variance needs at least two residuals");
  }
  double acc = 0.0;
  residuals_.for_each([&acc](double d) { acc += d * d; });
  return acc / static_cast<double>(residuals_.size());
}

ForecastBand Estimator::forecast(std::size_t horizon) const {
  if (horizon < 1) throw RangeError("forecast horizon must be at least 1");
  const double sigma = std::sqrt(moving_variance());
  ForecastBand band{{}, sigma};
  band.points.reserve(horizon);
  for (std::size_t tau = 1; tau <= horizon; ++tau) {
    const std::int64_t kk = k_ + static_cast<std::int64_t>(tau);
    const double mean = model_.predict_first_harmonic(theta_, kk);
    band.points.push_back({kk, mean, mean - 3.0 * sigma, mean + 3.0 * sigma});
  }
  return band;
}

}  // namespace swrls
