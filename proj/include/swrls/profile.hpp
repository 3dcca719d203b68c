// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace swrls {

/// x^e by repeated squaring.
double ipow(double x, std::uint64_t e) noexcept;

/// One scaled lagged regressor column of the per-step low-rank update.
struct TemplateEntry {
  std::size_t lag;
  double scale;  // > 0
  int sign;      // +1 adds the outer product, -1 removes it
};

/// Column layout of A_k = lambda * A_{k-1} + Q_k D Q_k^T for a weight law.
/// Entries are ordered by increasing lag.
class UpdateTemplate {
 public:
  explicit UpdateTemplate(std::vector<TemplateEntry> entries);

  std::size_t rank() const noexcept { return entries_.size(); }
  const std::vector<TemplateEntry>& entries() const noexcept { return entries_; }
  std::size_t max_lag() const noexcept { return entries_.back().lag; }

 private:
  std::vector<TemplateEntry> entries_;
};

/// Fast exponential segment beta^j on lags 0..p, a drop, then a slow tail
/// lambda^(m+j-p) on lags p+1..w-1, zero from lag w on.
class SegmentedProfile {
 public:
  /// Throws RangeError, DegenerateColumnError, DropConditionError or WindowError.
  static SegmentedProfile make(double beta, double lambda, int m, int p, std::size_t w);

  double beta() const noexcept { return beta_; }
  double lambda() const noexcept { return lambda_; }
  int m() const noexcept { return m_; }
  int p() const noexcept { return p_; }
  std::size_t window() const noexcept { return w_; }

  double weight(std::size_t j) const noexcept;
  UpdateTemplate update_template() const;
  /// f(p+1) / f(p) = lambda^(m+1) / beta^p, in (0, 1).
  double drop_ratio() const noexcept;

 private:
  SegmentedProfile(double beta, double lambda, int m, int p, std::size_t w)
      : beta_(beta), lambda_(lambda), m_(m), p_(p), w_(w) {}

  double beta_;
  double lambda_;
  int m_;
  int p_;
  std::size_t w_;
};

/// lambda^j on lags 0..w-1, or on every lag when the window is unbounded
/// (classical infinite-memory RLS).
class ExponentialProfile {
 public:
  static ExponentialProfile finite(double lambda, std::size_t w);
  static ExponentialProfile unbounded(double lambda);

  double lambda() const noexcept { return lambda_; }
  std::optional<std::size_t> window() const noexcept { return w_; }

  double weight(std::size_t j) const noexcept;
  UpdateTemplate update_template() const;

 private:
  ExponentialProfile(double lambda, std::optional<std::size_t> w) : lambda_(lambda), w_(w) {}

  double lambda_;
  std::optional<std::size_t> w_;
};

/// Any of the supported weight laws.
class ForgettingProfile {
 public:
  ForgettingProfile(SegmentedProfile p) : law_(p) {}    // NOLINT(google-explicit-constructor)
  ForgettingProfile(ExponentialProfile p) : law_(p) {}  // NOLINT(google-explicit-constructor)

  double weight(std::size_t j) const noexcept;
  UpdateTemplate update_template() const;
  /// Per-step decay applied to the whole information matrix.
  double decay() const noexcept;
  /// Window length; empty for the unbounded exponential law.
  std::optional<std::size_t> window() const noexcept;

  const SegmentedProfile* segmented() const noexcept { return std::get_if<SegmentedProfile>(&law_); }
  const ExponentialProfile* exponential() const noexcept {
    return std::get_if<ExponentialProfile>(&law_);
  }

  /// e.g. "segmented(beta=0.89,lambda=0.99,m=250,p=1,w=400)"
  std::string describe() const;

 private:
  std::variant<SegmentedProfile, ExponentialProfile> law_;
};

}  // namespace swrls
