// SPDX-License-Identifier: Apache-2.0
#include "swrls/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "swrls/app.hpp"
#include "swrls/oracle.hpp"

namespace swrls::verify {

namespace {

using app::fmt;

const HarmonicModel& yearly_model() {
  static const HarmonicModel model = HarmonicModel::make(365.25, 16);
  return model;
}

ForgettingProfile default_segmented() { return SegmentedProfile::make(0.89, 0.99, 250, 1, 400); }
ForgettingProfile default_exponential() { return ExponentialProfile::finite(0.99, 400); }

constexpr std::size_t kInit = 400;
constexpr std::size_t kSteps = 600;

std::vector<double> seeded_theta(std::size_t n, std::uint64_t seed) {
  oracle::CounterRng rng(seed);
  std::vector<double> theta(n);
  for (auto& t : theta) t = rng.normal();
  return theta;
}

oracle::SyntheticSpec yearly_spec(const Options& o, double sigma, std::size_t length) {
  const auto& model = yearly_model();
  return {model, seeded_theta(model.dimension(), oracle::derive_seed(o.seed, 1000)), sigma,
          oracle::derive_seed(o.seed, 2000), length};
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string join_status(bool ok, const std::string& label, const std::string& body) {
  return label + (ok ? " ok " : " FAIL ") + body;
}

// -- A1, A2 ---------------------------------------------------------------

Outcome trajectory_check(std::initializer_list<std::pair<const char*, ForgettingProfile>> runs,
                         const Options& o) {
  const auto samples = oracle::synth_generate(yearly_spec(o, 2.0, kInit + kSteps));
  bool ok = true;
  std::string detail;
  for (const auto& [label, profile] : runs) {
    oracle::TrajectoryOptions topt;
    topt.init_length = kInit;
    const auto rep = oracle::compare_trajectory(profile, yearly_model(), samples, topt);
    const bool pass = rep.max_theta_deviation <= 1e-6 && rep.max_gamma_deviation <= 1e-6 &&
                      rep.index.size() == kSteps + 1;
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += join_status(pass, label,
                          "max theta dev " + fmt(rep.max_theta_deviation) + " (k=" +
                              std::to_string(rep.worst_theta_index) + "), max gamma dev " +
                              fmt(rep.max_gamma_deviation) + " over " +
                              std::to_string(rep.index.size() - 1) + " steps");
  }
  return {ok, detail};
}

Outcome a1(const Options& o) { return trajectory_check({{"segmented", default_segmented()}}, o); }

Outcome a2(const Options& o) {
  return trajectory_check({{"exponential", default_exponential()},
                           {"infinite", ExponentialProfile::unbounded(0.99)}},
                          o);
}

// -- A3 -------------------------------------------------------------------

Outcome a3(const Options& o) {
  oracle::CounterRng rng(oracle::derive_seed(o.seed, 3000));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 48);
    const std::size_t rank = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const std::size_t removes =
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(rank));
    Matrix g(n, n);
    for (auto& x : g.values()) x = rng.normal();
    SymMatrix b = SymMatrix::from(g * g.transposed());
    b.add_diagonal(static_cast<double>(n));
    const Matrix b_inv_full = oracle::direct_inverse(b.full());
    const SymMatrix b_inv = SymMatrix::from(b_inv_full);

    LowRankBatch batch(n, rank);
    Matrix a = b.full();
    for (std::size_t l = 0; l < rank; ++l) {
      auto col = batch.column(l);
      for (auto& x : col) x = rng.normal();
      if (l >= rank - removes) {
        const auto bc = b_inv.full() * std::span<const double>(col);
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) quad += col[i] * bc[i];
        const double s = std::sqrt(0.5 / static_cast<double>(removes) / quad);
        for (auto& x : col) x *= s;
        batch.set_sign(l, -1);
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) += batch.sign(l) * col[i] * col[j];
    }
    const auto out = batch_inverse_update(b_inv, batch);
    worst = std::max(worst, relative_frobenius_error(out.full(), oracle::direct_inverse(a)));
  }

  // add then remove the same column
  double roundtrip = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 48);
    Matrix g(n, n);
    for (auto& x : g.values()) x = rng.normal();
    SymMatrix b = SymMatrix::from(g * g.transposed());
    b.add_diagonal(static_cast<double>(n));
    const SymMatrix b_inv = SymMatrix::from(oracle::direct_inverse(b.full()));
    LowRankBatch batch(n, 2);
    batch.set_sign(1, -1);
    for (std::size_t i = 0; i < n; ++i) batch.column(0)[i] = batch.column(1)[i] = rng.normal();
    roundtrip = std::max(roundtrip, relative_frobenius_error(
                                        batch_inverse_update(b_inv, batch).full(), b_inv.full()));
  }
  const bool ok = worst <= 1e-9 && roundtrip <= 1e-12;
  return {ok, "200 trials max error " + fmt(worst) + " (limit 1e-09), add/remove round trip " +
                  fmt(roundtrip) + " (limit 1e-12)"};
}

// -- A4 -------------------------------------------------------------------

Outcome a4(const Options&) {
  const auto prof = SegmentedProfile::make(0.89, 0.99, 250, 1, 400);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 <= 400; ++j) {
    const double next = prof.weight(j + 1);
    worst = std::max(worst, std::abs(next - 0.99 * prof.weight(j)) / next);
  }
  const auto t = prof.update_template();
  std::vector<int> signs;
  std::string sign_text;
  for (const auto& e : t.entries()) {
    signs.push_back(e.sign);
    sign_text += (sign_text.empty() ? "" : ",") + std::string(e.sign > 0 ? "+1" : "-1");
  }
  const bool ok = worst <= 1e-12 && t.rank() == 4 && signs == std::vector<int>{1, -1, -1, -1};
  return {ok, "max tail mismatch " + fmt(worst) + ", rank " + std::to_string(t.rank()) +
                  ", signs [" + sign_text + "]"};
}

// -- A5 -------------------------------------------------------------------

Outcome a5(const Options& o) {
  const auto spec = yearly_spec(o, 0.0, kInit + kSteps);
  const auto samples = oracle::synth_generate(spec);
  const auto& theta = spec.theta_star;
  double norm = 0.0;
  for (double t : theta) norm += t * t;
  norm = std::sqrt(norm);
  auto deviation = [&](const Estimator& est) {
    double d = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
      d += (est.theta()[i] - theta[i]) * (est.theta()[i] - theta[i]);
    return std::sqrt(d) / norm;
  };
  bool ok = true;
  std::string detail;
  for (const auto& [label, profile] :
       {std::pair<const char*, ForgettingProfile>{"segmented", default_segmented()},
        {"exponential", default_exponential()},
        {"infinite", ExponentialProfile::unbounded(0.99)}}) {
    auto est = Estimator::init(profile, yearly_model(), std::span(samples).first(kInit));
    double worst = deviation(est);
    for (std::size_t i = kInit; i < samples.size(); ++i) {
      est.step(samples[i]);
      worst = std::max(worst, deviation(est));
    }
    const bool pass = worst <= 1e-8;
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += join_status(pass, label, "max relative error " + fmt(worst));
  }
  return {ok, detail};
}

// -- A6, A10 (Stockholm) --------------------------------------------------

IndexedSeries load_stockholm(const Options& o) {
  app::RunConfig c;
  c.input = *o.stockholm_path;
  c.format = o.stockholm_format;
  c.value_column = o.value_column;
  c.gap_policy = "interpolate";
  return app::load_series(c);
}

Outcome a6(const Options& o) {
  const auto series = load_stockholm(o);
  if (series.samples.size() < kInit + 3000) {
    throw InsufficientDataError("Stockholm series spans " + std::to_string(series.samples.size()) +
                                " days, need at least " + std::to_string(kInit + 3000));
  }
  const auto seg = app::run_fit(default_segmented(), yearly_model(), series.samples, {}, kInit, 0);
  const auto exp = app::run_fit(default_exponential(), yearly_model(), series.samples, {}, kInit, 0);
  const auto& s = seg.summary;
  const auto& e = exp.summary;
  const bool ok = s.rmse < e.rmse && s.residual_std < e.residual_std;
  return {ok, "span " + format_date(series.origin) + ".." +
                  format_date(series.date_of(static_cast<std::int64_t>(series.samples.size()))) +
                  ", rmse segmented " + fmt(s.rmse) + " vs exponential " + fmt(e.rmse) +
                  " (ratio " + fmt(s.rmse / e.rmse) + "), residual std " + fmt(s.residual_std) +
                  " vs " + fmt(e.residual_std)};
}

Outcome a10(const Options& o) {
  using namespace std::chrono;
  const auto series = load_stockholm(o);
  const Date last = series.date_of(static_cast<std::int64_t>(series.samples.size()));
  // Held-out year: the last complete calendar year in the file.
  year held = last.year();
  if (!(last.month() == December && last.day() == day{31})) --held;
  const std::int64_t first_k = series.index_of(Date{held / January / 1});
  const std::int64_t last_k = series.index_of(Date{held / December / 31});
  if (first_k <= static_cast<std::int64_t>(kInit)) {
    throw InsufficientDataError("not enough history before the held-out year");
  }
  const auto samples = std::span<const Sample>(series.samples);
  std::optional<Estimator> est;
  app::run_fit(default_segmented(), yearly_model(), samples.first(static_cast<std::size_t>(first_k - 1)),
               {}, kInit, 0, &est);
  const auto cov = app::rolling_coverage(*est, samples, static_cast<std::size_t>(first_k - 1),
                                         static_cast<std::size_t>(last_k - first_k + 1), 30);
  const bool ok = cov.fraction >= 0.90;
  return {ok, "held-out " + std::to_string(static_cast<int>(held)) + ", 30-day rolling forecasts, " +
                  std::to_string(cov.inside) + "/" + std::to_string(cov.forecasts) +
                  " inside +-3 sigma, coverage " + fmt(cov.fraction) +
                  " (threshold 0.90 is an operationalization of the qualitative claim)"};
}

// -- A7 -------------------------------------------------------------------

Outcome a7(const Options&) {
  const auto& model = yearly_model();
  const std::int64_t k = 400;
  auto cond = [&](const ForgettingProfile& p) {
    SymMatrix a(model.dimension());
    for (std::size_t j = 0; j < 400; ++j)
      a.add_outer(p.weight(j), model.regressor_at(k - static_cast<std::int64_t>(j)));
    return condition_number(a);
  };
  const double fast = cond(ExponentialProfile::finite(0.92, 400));
  const double seg = cond(SegmentedProfile::make(0.92, 0.96, 60, 1, 400));
  const double slow = cond(ExponentialProfile::finite(0.96, 400));
  return {fast > seg && seg > slow, "cond beta-only " + fmt(fast) + " > segmented(m=60) " +
                                        fmt(seg) + " > lambda-only " + fmt(slow)};
}

// -- A8 -------------------------------------------------------------------

Outcome a8(const Options& o) {
  const auto rep = oracle::accumulation_experiment(35, 8, 1e8, o.accumulation_trials,
                                                   oracle::derive_seed(o.seed, 8000));
  const bool ok = rep.median_batch_error <= rep.median_chain_error;
  return {ok, std::to_string(o.accumulation_trials) + " trials, median error batch " +
                  fmt(rep.median_batch_error) + " vs chain " + fmt(rep.median_chain_error) +
                  ", median asymmetry batch " + fmt(rep.median_batch_asymmetry) + " vs chain " +
                  fmt(rep.median_chain_asymmetry) + ", singular incidents " +
                  std::to_string(rep.singular_incidents)};
}

// -- A9 -------------------------------------------------------------------

Outcome a9(const Options& o) {
  auto spec = yearly_spec(o, 1.0, 0);
  spec.seed = oracle::derive_seed(o.seed, 9000);
  const std::int64_t k = static_cast<std::int64_t>(kInit) + 100;
  const auto rep = oracle::monte_carlo_bias(default_segmented(), spec, o.bias_trials, k);
  return {rep.max_z <= 4.0, std::to_string(rep.trials) + " trials at k=" + std::to_string(k) +
                                ", max |bias|/SE " + fmt(rep.max_z) + " (limit 4)"};
}

// -- A11 ------------------------------------------------------------------

Outcome a11(const Options& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("swrls-a11-" + std::to_string(o.seed) + "-" +
                        std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};

  app::RunConfig synth;
  synth.command = "synth";
  synth.seed = o.seed;
  synth.length = 1200;
  synth.noise = 2.0;
  std::ostringstream s1;
  std::ostringstream s2;
  app::cmd_synth(synth, s1);
  app::cmd_synth(synth, s2);
  const fs::path input = dir / "synth.csv";
  std::ofstream(input, std::ios::binary) << s1.str();

  app::RunConfig fit;
  fit.command = "fit";
  fit.input = input.string();
  fit.cond_every = 50;
  std::ostringstream f1;
  std::ostringstream f2;
  app::cmd_fit(fit, f1);
  app::cmd_fit(fit, f2);
  const bool synth_same = s1.str() == s2.str();
  const bool fit_same = f1.str() == f2.str();
  return {synth_same && fit_same,
          std::string("synth ") + (synth_same ? "identical" : "DIFFERS") + " (" +
              std::to_string(s1.str().size()) + " bytes), fit " +
              (fit_same ? "identical" : "DIFFERS") + " (" + std::to_string(f1.str().size()) +
              " bytes)"};
}

struct Criterion {
  std::string_view id;
  const char* title;
  double limit;
  bool needs_stockholm;
  Outcome (*run)(const Options&);
};

constexpr Criterion kCriteria[] = {
    {"A1", "oracle equivalence, segmented profile", 60.0, false, a1},
    {"A2", "oracle equivalence, exponential and infinite profiles", 60.0, false, a2},
    {"A3", "batch Woodbury update vs direct inverse", 10.0, false, a3},
    {"A4", "telescoping tail and rank-4 template", 0.0, false, a4},
    {"A5", "noiseless recovery and fixed point", 0.0, false, a5},
    {"A6", "segmented beats exponential on Stockholm data", 300.0, true, a6},
    {"A7", "condition ordering of beta-only, segmented and lambda-only weighting", 0.0, false, a7},
    {"A8", "batch vs chained update error accumulation", 30.0, false, a8},
    {"A9", "Monte-Carlo unbiasedness", 300.0, false, a9},
    {"A10", "30-day forecast band coverage on Stockholm data", 0.0, true, a10},
    {"A11", "byte-identical fit and synth output", 0.0, false, a11},
};

}  // namespace

std::vector<std::string_view> criterion_ids() {
  std::vector<std::string_view> ids;
  for (const auto& c : kCriteria) ids.push_back(c.id);
  return ids;
}

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::pass:
      return "PASS";
    case Status::fail:
      return "FAIL";
    case Status::blocked:
      return "BLOCKED";
  }
  return "?";
}

CriterionResult run_criterion(std::string_view id, const Options& options) {
  const Criterion* crit = nullptr;
  for (const auto& c : kCriteria)
    if (c.id == id) crit = &c;
  if (crit == nullptr) throw std::invalid_argument("unknown criterion '" + std::string{id} + "'");

  CriterionResult r{std::string{crit->id}, crit->title, Status::fail, {}, 0.0, crit->limit};
  if (crit->needs_stockholm && !options.stockholm_path) {
    r.status = Status::blocked;
    r.detail = "no Stockholm series supplied (pass --input or set SWRLS_STOCKHOLM_FILE)";
    return r;
  }
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome out = crit->run(options);
    r.status = out.pass ? Status::pass : Status::fail;
    r.detail = out.detail;
  } catch (const std::exception& e) {
    r.status = Status::fail;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
    r.status = Status::fail;
    r.detail += "; exceeded the " + fmt(r.time_limit) + " s limit";
  }
  return r;
}

std::string format_line(const CriterionResult& r) {
  char timing[48];
  std::snprintf(timing, sizeof timing, "%.2f s", r.seconds);
  std::string line = r.id;
  line.resize(4, ' ');
  std::string status{to_string(r.status)};
  status.resize(8, ' ');
  return line + status + r.title + ": " + r.detail + " [" + timing + "]";
}

}  // namespace swrls::verify
