// SPDX-License-Identifier: Apache-2.0
// swrls: fit, compare, forecast, verify and synth front end.

#include <CLI11.hpp>

#include <iostream>

#include "swrls/app.hpp"

namespace {

using swrls::app::RunConfig;

void add_model_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--period", c.period, "Harmonic period T in samples")->capture_default_str();
  cmd->add_option("--harmonics", c.harmonics, "Higher harmonics h (n = 2(h+1)+1)")
      ->capture_default_str();
}

void add_profile_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--profile", c.profile, "segmented | exponential | infinite")
      ->capture_default_str();
  cmd->add_option("--beta", c.beta, "Fast-segment factor")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "Slow-segment / exponential factor")
      ->capture_default_str();
  cmd->add_option("--m", c.m, "Slow-segment exponent offset")->capture_default_str();
  cmd->add_option("--p", c.p, "Length of the fast segment")->capture_default_str();
  cmd->add_option("--window", c.window,
                  "Window w (initial length for the infinite profile)")
      ->capture_default_str();
  cmd->add_option("--epsilon", c.epsilon, "Diagonal loading used if the first window is singular")
      ->capture_default_str();
  cmd->add_option("--reinit", c.reinit, "Rebuild Gamma from the window every R steps (0 = off)")
      ->capture_default_str();
}

void add_input_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--input", c.input, "Input series file");
  cmd->add_option("--format", c.format, "csv | stockholm")->capture_default_str();
  cmd->add_option("--value-column", c.value_column,
                  "1-based value column of the Stockholm format")
      ->capture_default_str();
  cmd->add_option("--start", c.start, "First date YYYY-MM-DD");
  cmd->add_option("--end", c.end, "Last date YYYY-MM-DD");
  cmd->add_option("--gap-policy", c.gap_policy, "fail | interpolate | previous")
      ->capture_default_str();
}

void add_output_flag(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--output", c.output, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  CLI::App app{"Sliding-window RLS with segmented forgetting profiles"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit the harmonic model and write per-step residuals");
  auto* compare = app.add_subcommand("compare", "Fit two profiles over the same span");
  auto* forecast = app.add_subcommand("forecast", "First-harmonic forecast with a 3-sigma band");
  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic series as CSV");

  for (auto* cmd : {fit, compare, forecast}) {
    add_input_flags(cmd, config);
    add_profile_flags(cmd, config);
    add_model_flags(cmd, config);
    add_output_flag(cmd, config);
  }
  fit->add_option("--cond-every", config.cond_every, "Report cond(A) every C steps (0 = never)")
      ->capture_default_str();
  compare->add_option("--baseline", config.baseline, "Profile compared against --profile")
      ->capture_default_str();
  forecast->add_option("--horizon", config.horizon, "Forecast horizon H in days")
      ->capture_default_str();

  verify->add_option("--seed", config.seed, "Base seed for the synthetic suites")
      ->capture_default_str();
  verify->add_option("--trials", config.trials, "Monte-Carlo and accumulation trials (>= 100)");
  verify->add_option("--input", config.input, "Stockholm series enabling A6 and A10");
  verify->add_option("--format", config.format, "csv | stockholm");
  verify->add_option("--value-column", config.value_column, "Stockholm value column");
  add_output_flag(verify, config);

  add_model_flags(synth, config);
  synth->add_option("--seed", config.seed, "Noise seed")->capture_default_str();
  synth->add_option("--theta", config.theta, "Generating parameters (n values)")->delimiter(',');
  synth->add_option("--noise", config.noise, "Noise standard deviation")->capture_default_str();
  synth->add_option("--length", config.length, "Number of days")->capture_default_str();
  synth->add_option("--start", config.start, "First date YYYY-MM-DD (default 2000-01-01)");
  add_output_flag(synth, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(swrls::app::ExitCode::config);
  }
  config.command = app.get_subcommands().front()->get_name();
  // verify reads the Stockholm layout unless told otherwise
  if (config.command == "verify" && verify->count("--format") == 0) config.format = "stockholm";
  return swrls::app::run(config, std::cout, std::cerr);
}
