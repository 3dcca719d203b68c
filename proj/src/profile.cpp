// SPDX-License-Identifier: Apache-2.0
#include "swrls/profile.hpp"

#include <cmath>
#include <cstdio>

#include "swrls/error.hpp"

namespace swrls {

double ipow(double x, std::uint64_t e) noexcept {
  double result = 1.0;
  while (e != 0) {
    if (e & 1U) result *= x;
    x *= x;
    e >>= 1U;
  }
  return result;
}

UpdateTemplate::UpdateTemplate(std::vector<TemplateEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DegenerateColumnError("update template has no columns");
  for (const auto& e : entries_) {
    if (!(e.scale > 0.0)) {
      throw DegenerateColumnError("update template column at lag " + std::to_string(e.lag) +
                                  " has zero scale");
    }
  }
}

namespace {

void check_factor(const char* name, double v) {
  if (!(v > 0.0 && v < 1.0)) {
    throw RangeError(std::string{name} + " must lie in (0, 1), got " + std::to_string(v));
  }
}

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

SegmentedProfile SegmentedProfile::make(double beta, double lambda, int m, int p, std::size_t w) {
  check_factor("beta", beta);
  check_factor("lambda", lambda);
  if (m < 1) throw RangeError("m must be a positive integer");
  if (p < 1) throw RangeError("p must be a positive integer");
  if (beta == lambda) {
    throw DegenerateColumnError("beta == lambda gives a zero-scale column at lag 1");
  }
  const double lm = ipow(lambda, static_cast<std::uint64_t>(m));
  const double bp = ipow(beta, static_cast<std::uint64_t>(p));
  if (lm == bp) {
    throw DegenerateColumnError("lambda^m == beta^p gives a zero-scale column at lag p+1");
  }
  if (!(lm * lambda < bp)) {
    throw DropConditionError("profile has no drop: lambda^(m+1) >= beta^p");
  }
  if (static_cast<std::size_t>(p) + 1 >= w) throw WindowError("window must satisfy p + 1 < w");
  // The removal column at lag w carries sqrt(lambda^(m+w-p)); once that
  // underflows the oldest sample could never leave the window.
  if (!(ipow(lambda, static_cast<std::uint64_t>(m) + w - static_cast<std::size_t>(p)) > 0.0)) {
    throw WindowError("lambda^(m+w-p) underflows double precision; shorten the window");
  }
  return SegmentedProfile(beta, lambda, m, p, w);
}

double SegmentedProfile::weight(std::size_t j) const noexcept {
  const auto p = static_cast<std::size_t>(p_);
  if (j <= p) return ipow(beta_, j);
  if (j < w_) return ipow(lambda_, static_cast<std::uint64_t>(m_) + j - p);
  return 0.0;
}

UpdateTemplate SegmentedProfile::update_template() const {
  // Column at lag j carries f(j) - lambda * f(j-1); the tail between lag p+2
  // and w-1 cancels exactly, leaving p + 3 columns.
  const auto p = static_cast<std::size_t>(p_);
  std::vector<TemplateEntry> entries;
  entries.reserve(p + 3);
  entries.push_back({0, 1.0, +1});
  const int fast_sign = beta_ > lambda_ ? +1 : -1;
  for (std::size_t j = 1; j <= p; ++j) {
    entries.push_back({j, std::sqrt(ipow(beta_, j - 1) * std::abs(beta_ - lambda_)), fast_sign});
  }
  const double lm = ipow(lambda_, static_cast<std::uint64_t>(m_));
  const double bp = ipow(beta_, p);
  entries.push_back({p + 1, std::sqrt(std::abs(lm - bp) * lambda_), lm > bp ? +1 : -1});
  entries.push_back({w_, std::sqrt(ipow(lambda_, static_cast<std::uint64_t>(m_) + w_ - p)), -1});
  return UpdateTemplate(std::move(entries));
}

double SegmentedProfile::drop_ratio() const noexcept {
  return ipow(lambda_, static_cast<std::uint64_t>(m_) + 1) /
         ipow(beta_, static_cast<std::uint64_t>(p_));
}

ExponentialProfile ExponentialProfile::finite(double lambda, std::size_t w) {
  check_factor("lambda", lambda);
  if (w < 1) throw WindowError("window must be positive");
  if (!(ipow(lambda, w) > 0.0)) {
    throw WindowError("lambda^w underflows double precision; shorten the window");
  }
  return ExponentialProfile(lambda, w);
}

ExponentialProfile ExponentialProfile::unbounded(double lambda) {
  check_factor("lambda", lambda);
  return ExponentialProfile(lambda, std::nullopt);
}

double ExponentialProfile::weight(std::size_t j) const noexcept {
  if (w_ && j >= *w_) return 0.0;
  return ipow(lambda_, j);
}

UpdateTemplate ExponentialProfile::update_template() const {
  if (!w_) return UpdateTemplate({{0, 1.0, +1}});
  return UpdateTemplate({{0, 1.0, +1}, {*w_, std::sqrt(ipow(lambda_, *w_)), -1}});
}

double ForgettingProfile::weight(std::size_t j) const noexcept {
  return std::visit([j](const auto& law) { return law.weight(j); }, law_);
}

UpdateTemplate ForgettingProfile::update_template() const {
  return std::visit([](const auto& law) { return law.update_template(); }, law_);
}

double ForgettingProfile::decay() const noexcept {
  return std::visit([](const auto& law) { return law.lambda(); }, law_);
}

std::optional<std::size_t> ForgettingProfile::window() const noexcept {
  if (const auto* s = segmented()) return s->window();
  return exponential()->window();
}

std::string ForgettingProfile::describe() const {
  if (const auto* s = segmented()) {
    return "segmented(beta=" + fmt_real(s->beta()) + ",lambda=" + fmt_real(s->lambda()) +
           ",m=" + std::to_string(s->m()) + ",p=" + std::to_string(s->p()) +
           ",w=" + std::to_string(s->window()) + ")";
  }
  const auto* e = exponential();
  if (e->window()) {
    return "exponential(lambda=" + fmt_real(e->lambda()) + ",w=" + std::to_string(*e->window()) +
           ")";
  }
  return "infinite(lambda=" + fmt_real(e->lambda()) + ")";
}

}  // namespace swrls
