// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace swrls {

/// One observation y at integer time index k.
struct Sample {
  std::int64_t k;
  double y;
};

/// Known-frequency harmonic model
///   phi_k = [1, cos(q_0 k), sin(q_0 k), ..., cos(q_h k), sin(q_h k)]
/// with q_i = 2 pi (i + 1) / T. Parameter vectors use the same interleaved
/// order [dc, a_0, b_0, ..., a_h, b_h].
class HarmonicModel {
 public:
  /// Throws RangeError for T <= 0 or h < 0, NyquistError when q_h >= pi.
  static HarmonicModel make(double period, int harmonics);

  double period() const noexcept { return period_; }
  int harmonics() const noexcept { return static_cast<int>(freqs_.size()) - 1; }
  std::size_t dimension() const noexcept { return 2 * freqs_.size() + 1; }
  double frequency(std::size_t i) const noexcept { return freqs_[i]; }

  /// Writes phi_k into `out` (size dimension()).
  void regressor_at(std::int64_t k, std::span<double> out) const;
  std::vector<double> regressor_at(std::int64_t k) const;

  /// phi_k^T theta. Throws DimensionError on size mismatch.
  double predict(std::span<const double> theta, std::int64_t k) const;
  /// dc + a_0 cos(q_0 k) + b_0 sin(q_0 k).
  double predict_first_harmonic(std::span<const double> theta, std::int64_t k) const;

 private:
  HarmonicModel(double period, std::vector<double> freqs)
      : period_(period), freqs_(std::move(freqs)) {}
  void check(std::span<const double> theta) const;

  double period_;
  std::vector<double> freqs_;
};

}  // namespace swrls
