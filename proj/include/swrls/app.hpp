// SPDX-License-Identifier: Apache-2.0
#pragma once
// Command implementations behind the `swrls` executable. Each command writes
// plot-ready CSV to a stream and reports failures as exceptions that
// exit_code_for() maps onto the documented process exit codes.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swrls/error.hpp"
#include "swrls/estimator.hpp"
#include "swrls/ingest.hpp"

namespace swrls::app {

enum class ExitCode : int {
  ok = 0,
  verification_failed = 1,
  config = 2,
  data = 3,
  numerical = 4,
};

/// Invalid flag combination; the message lists every problem found.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened or read.
class InputError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::optional<std::string> input;
  std::string format = "csv";  // csv | stockholm
  int value_column = 4;

  std::string profile = "segmented";  // segmented | exponential | infinite
  std::string baseline = "exponential";
  double beta = 0.89;
  double lambda = 0.99;
  int m = 250;
  int p = 1;
  std::size_t window = 400;

  double period = 365.25;
  int harmonics = 16;

  std::optional<std::string> start;
  std::optional<std::string> end;
  std::size_t horizon = 30;
  double epsilon = 0.0;
  std::string gap_policy = "fail";
  std::size_t reinit = 0;
  std::uint64_t seed = 1;
  std::optional<std::string> output;
  std::size_t cond_every = 0;

  // synth
  std::vector<double> theta;
  double noise = 1.0;
  std::size_t length = 3650;

  // verify
  std::optional<std::size_t> trials;
};

/// Throws ConfigError listing all problems at once.
void validate(const RunConfig& config);

/// Builds the forgetting profile named by `name` from the shared factors.
ForgettingProfile make_profile(const RunConfig& config, const std::string& name);

/// Reads and indexes the configured input over [start, end].
IndexedSeries load_series(const RunConfig& config);

int cmd_fit(const RunConfig& config, std::ostream& out);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_forecast(const RunConfig& config, std::ostream& out);
int cmd_synth(const RunConfig& config, std::ostream& out);
int cmd_verify(const RunConfig& config, std::ostream& out);

/// Validates, opens --output (stdout when absent), runs the command and maps
/// exceptions to exit codes with a one-line diagnostic on `err`.
int run(const RunConfig& config, std::ostream& stdout_stream, std::ostream& err);

ExitCode exit_code_for(const std::exception& e) noexcept;

/// "%.9g"
std::string fmt(double v);

struct FitSummary {
  double rmse = 0.0;
  double residual_mean = 0.0;
  double residual_std = 0.0;
  std::size_t rows = 0;
};

struct FitTrace {
  std::vector<std::int64_t> k;
  std::vector<double> y;
  std::vector<double> yhat_full;
  std::vector<double> yhat_first;
  std::vector<double> residual;
  std::vector<double> condition;  // NaN where not sampled
  FitSummary summary;
  bool loading_applied = false;
  std::size_t reinit_count = 0;
};

/// Batch init over the first window then one step per remaining sample,
/// recording the approximation residual y_k - phi_k^T theta_k from index w on.
/// `final_state` receives the estimator after the last sample when non-null.
FitTrace run_fit(const ForgettingProfile& profile, const HarmonicModel& model,
                 std::span<const Sample> samples, const EstimatorOptions& options,
                 std::size_t init_length, std::size_t cond_every,
                 std::optional<Estimator>* final_state = nullptr);

FitSummary summarize(std::span<const double> residuals);

struct CoverageReport {
  std::size_t forecasts = 0;
  std::size_t inside = 0;
  double fraction = 0.0;
};

/// Rolling H-day forecasts over samples [first, first + count): forecast from
/// the current state, score against the observed values, then step through
/// them and repeat. `est` must sit at samples[first - 1].
CoverageReport rolling_coverage(Estimator& est, std::span<const Sample> samples,
                                std::size_t first, std::size_t count, std::size_t horizon);

}  // namespace swrls::app
