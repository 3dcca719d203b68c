// SPDX-License-Identifier: Apache-2.0
#include "swrls/regressor.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "swrls/error.hpp"

namespace swrls {

HarmonicModel HarmonicModel::make(double period, int harmonics) {
  if (!(period > 0.0) || !std::isfinite(period)) throw RangeError("period must be positive");
  if (harmonics < 0) throw RangeError("harmonic count must be non-negative");
  std::vector<double> freqs(static_cast<std::size_t>(harmonics) + 1);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    freqs[i] = 2.0 * std::numbers::pi * static_cast<double>(i + 1) / period;
  }
  if (!(freqs.back() < std::numbers::pi)) {
    throw NyquistError("highest harmonic frequency " + std::to_string(freqs.back()) +
                       " reaches the Nyquist limit pi");
  }
  return HarmonicModel(period, std::move(freqs));
}

void HarmonicModel::regressor_at(std::int64_t k, std::span<double> out) const {
  if (out.size() != dimension()) throw DimensionError("regressor buffer size");
  const auto kd = static_cast<double>(k);
  out[0] = 1.0;
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    const double angle = freqs_[i] * kd;
    out[2 * i + 1] = std::cos(angle);
    out[2 * i + 2] = std::sin(angle);
  }
}

std::vector<double> HarmonicModel::regressor_at(std::int64_t k) const {
  std::vector<double> phi(dimension());
  regressor_at(k, phi);
  return phi;
}

void HarmonicModel::check(std::span<const double> theta) const {
  if (theta.size() != dimension()) {
    throw DimensionError("parameter vector has " + std::to_string(theta.size()) +
                         " entries, model needs " + std::to_string(dimension()));
  }
}

double HarmonicModel::predict(std::span<const double> theta, std::int64_t k) const {
  check(theta);
  const auto phi = regressor_at(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) acc += phi[i] * theta[i];
  return acc;
}

double HarmonicModel::predict_first_harmonic(std::span<const double> theta, std::int64_t k) const {
  check(theta);
  const double angle = freqs_[0] * static_cast<double>(k);
  return theta[0] + theta[1] * std::cos(angle) + theta[2] * std::sin(angle);
}

}  // namespace swrls
