// SPDX-License-Identifier: Apache-2.0
#pragma once
// The acceptance criteria A1..A11 as runnable checks, shared by
// `swrls verify` and the acceptance test binary.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swrls::verify {

enum class Status { pass, fail, blocked };

struct CriterionResult {
  std::string id;
  std::string title;
  Status status = Status::fail;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; 0 when the criterion has none
};

struct Options {
  std::uint64_t seed = 1;
  std::size_t bias_trials = 200;
  std::size_t accumulation_trials = 100;
  /// Stockholm daily series for A6 and A10; those report blocked without it.
  std::optional<std::string> stockholm_path;
  std::string stockholm_format = "stockholm";
  int value_column = 4;
};

std::vector<std::string_view> criterion_ids();

/// Runs one criterion ("A1".."A11"). Exceeding the time limit fails it.
/// Throws std::invalid_argument for an unknown id.
CriterionResult run_criterion(std::string_view id, const Options& options);

/// "A1  PASS  title  (detail) [1.23 s]"
std::string format_line(const CriterionResult& r);

std::string_view to_string(Status s) noexcept;

}  // namespace swrls::verify
