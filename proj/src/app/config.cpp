// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "swrls/app.hpp"

namespace swrls::app {

namespace {

bool one_of(const std::string& v, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (v == n) return true;
  return false;
}

template <class F>
void collect(std::vector<std::string>& problems, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    problems.emplace_back(e.what());
  }
}

template <class... T>
bool is_any(const std::exception& e) noexcept {
  return (... || (dynamic_cast<const T*>(&e) != nullptr));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("failed reading '" + path + "'");
  return ss.str();
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void validate(const RunConfig& c) {
  std::vector<std::string> problems;
  const bool needs_input = one_of(c.command, {"fit", "compare", "forecast"});
  if (!one_of(c.command, {"fit", "compare", "forecast", "verify", "synth"})) {
    problems.push_back("unknown command '" + c.command + "'");
  }
  if (needs_input && !c.input) problems.push_back("--input is required for " + c.command);
  if (!one_of(c.format, {"csv", "stockholm"})) {
    problems.push_back("--format must be csv or stockholm, got '" + c.format + "'");
  }
  if (c.value_column < 4) problems.push_back("--value-column must be 4 or greater");
  for (const auto* name : {&c.profile, &c.baseline}) {
    if (!one_of(*name, {"segmented", "exponential", "infinite"})) {
      problems.push_back("unknown profile '" + *name + "'");
    }
  }
  if (one_of(c.profile, {"segmented", "exponential", "infinite"})) {
    collect(problems, [&] { make_profile(c, c.profile); });
  }
  if (c.command == "compare" && c.baseline != c.profile &&
      one_of(c.baseline, {"segmented", "exponential", "infinite"})) {
    collect(problems, [&] { make_profile(c, c.baseline); });
  }
  collect(problems, [&] {
    const auto model = HarmonicModel::make(c.period, c.harmonics);
    if (!c.theta.empty() && c.theta.size() != model.dimension()) {
      throw ConfigError("--theta has " + std::to_string(c.theta.size()) +
                        " entries, the model has " + std::to_string(model.dimension()));
    }
  });
  collect(problems, [&] { parse_gap_policy(c.gap_policy); });
  std::optional<Date> start;
  std::optional<Date> end;
  if (c.start) collect(problems, [&] { start = parse_date(*c.start); });
  if (c.end) collect(problems, [&] { end = parse_date(*c.end); });
  if (start && end && std::chrono::sys_days{*start} > std::chrono::sys_days{*end}) {
    problems.push_back("--start is after --end");
  }
  if (c.command == "synth" && !c.start && c.end) {
    problems.push_back("synth takes --start and --length, not --end");
  }
  if (c.horizon < 1) problems.push_back("--horizon must be at least 1");
  if (!(c.epsilon >= 0.0)) problems.push_back("--epsilon must be non-negative");
  if (!(c.noise >= 0.0)) problems.push_back("--noise must be non-negative");
  if (c.length < 1) problems.push_back("--length must be at least 1");
  if (c.trials && *c.trials < 100) {
    problems.push_back("--trials must be at least 100, got " + std::to_string(*c.trials));
  }
  if (problems.empty()) return;
  std::string msg = "invalid configuration: ";
  for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
  throw ConfigError(msg);
}

ForgettingProfile make_profile(const RunConfig& c, const std::string& name) {
  if (name == "segmented") return SegmentedProfile::make(c.beta, c.lambda, c.m, c.p, c.window);
  if (name == "exponential") return ExponentialProfile::finite(c.lambda, c.window);
  if (name == "infinite") return ExponentialProfile::unbounded(c.lambda);
  throw ConfigError("unknown profile '" + name + "'");
}

IndexedSeries load_series(const RunConfig& c) {
  const std::string text = read_file(*c.input);
  const auto records = c.format == "stockholm" ? parse_stockholm(text, c.value_column)
                                               : parse_csv(text);
  if (records.empty()) throw InsufficientDataError("input holds no records");
  std::optional<Date> start;
  std::optional<Date> end;
  if (c.start) start = parse_date(*c.start);
  if (c.end) end = parse_date(*c.end);
  return to_indexed(records, start, end, parse_gap_policy(c.gap_policy));
}

ExitCode exit_code_for(const std::exception& e) noexcept {
  if (is_any<ConfigError, RangeError, DropConditionError, DegenerateColumnError, WindowError,
             WindowTooSmallError, NyquistError, DimensionError>(e)) {
    return ExitCode::config;
  }
  if (is_any<InputError, ParseError, CalendarError, GapError, IndexGapError,
             InsufficientDataError>(e)) {
    return ExitCode::data;
  }
  return ExitCode::numerical;
}

int run(const RunConfig& config, std::ostream& stdout_stream, std::ostream& err) {
  try {
    validate(config);
    std::ofstream file;
    std::ostream* out = &stdout_stream;
    if (config.output) {
      file.open(*config.output, std::ios::binary | std::ios::trunc);
      if (!file) throw InputError("cannot open output file '" + *config.output + "'");
      out = &file;
    }
    int code = 0;
    if (config.command == "fit") code = cmd_fit(config, *out);
    else if (config.command == "compare") code = cmd_compare(config, *out, err);
    else if (config.command == "forecast") code = cmd_forecast(config, *out);
    else if (config.command == "synth") code = cmd_synth(config, *out);
    else code = cmd_verify(config, *out);
    out->flush();
    if (!*out) throw InputError("failed writing output");
    return code;
  } catch (const std::exception& e) {
    const ExitCode code = exit_code_for(e);
    const char* kind = code == ExitCode::config ? "config error"
                       : code == ExitCode::data ? "data error"
                                                : "numerical failure";
    err << "swrls: " << kind << ": " << e.what() << '\n';
    return static_cast<int>(code);
  }
}

}  // namespace swrls::app
