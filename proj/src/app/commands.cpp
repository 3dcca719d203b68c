// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "swrls/app.hpp"
#include "swrls/oracle.hpp"
#include "swrls/verify.hpp"

namespace swrls::app {

namespace {

constexpr std::size_t kHistogramBins = 41;

EstimatorOptions estimator_options(const RunConfig& c) {
  return EstimatorOptions{.diagonal_loading = c.epsilon, .reinit_period = c.reinit};
}

/// Samples consumed by init: w for finite profiles, --window for the
/// unbounded one.
std::size_t init_length(const ForgettingProfile& profile, const RunConfig& c) {
  return profile.window().value_or(c.window);
}

void meta(std::ostream& out, const char* key, const std::string& value) {
  out << "# " << key << '=' << value << '\n';
}

void meta(std::ostream& out, const char* key, double value) { meta(out, key, fmt(value)); }

void meta_input(std::ostream& out, const RunConfig& c, const IndexedSeries& s) {
  meta(out, "input", *c.input);
  meta(out, "format", c.format);
  if (c.format == "stockholm") meta(out, "value_column", std::to_string(c.value_column));
  meta(out, "span", format_date(s.origin) + ".." +
                        format_date(s.date_of(static_cast<std::int64_t>(s.samples.size()))));
  meta(out, "gap_policy", std::string{to_string(s.policy)});
  meta(out, "filled_days", std::to_string(s.filled.size()));
  if (!s.filled.empty()) {
    std::string list;
    for (const auto& d : s.filled) list += (list.empty() ? "" : ";") + format_date(d);
    meta(out, "filled_dates", list);
  }
}

void meta_model(std::ostream& out, const RunConfig& c, const HarmonicModel& model) {
  meta(out, "period", c.period);
  meta(out, "harmonics", std::to_string(c.harmonics));
  meta(out, "parameters", std::to_string(model.dimension()));
}

void meta_estimator(std::ostream& out, const RunConfig& c, const FitTrace& t) {
  meta(out, "epsilon", c.epsilon);
  meta(out, "loading_applied", t.loading_applied ? "true" : "false");
  meta(out, "reinit", std::to_string(c.reinit));
  meta(out, "reinit_count", std::to_string(t.reinit_count));
}

std::string cell(double v) { return std::isnan(v) ? std::string{} : fmt(v); }

}  // namespace

FitSummary summarize(std::span<const double> r) {
  FitSummary s;
  s.rows = r.size();
  if (r.empty()) return s;
  double sq = 0.0;
  double sum = 0.0;
  for (double v : r) {
    sq += v * v;
    sum += v;
  }
  const auto n = static_cast<double>(r.size());
  s.rmse = std::sqrt(sq / n);
  s.residual_mean = sum / n;
  double dev = 0.0;
  for (double v : r) dev += (v - s.residual_mean) * (v - s.residual_mean);
  s.residual_std = r.size() > 1 ? std::sqrt(dev / (n - 1.0)) : 0.0;
  return s;
}

FitTrace run_fit(const ForgettingProfile& profile, const HarmonicModel& model,
                 std::span<const Sample> samples, const EstimatorOptions& options,
                 std::size_t init, std::size_t cond_every,
                 std::optional<Estimator>* final_state) {
  if (samples.size() < init) {
    throw InsufficientDataError("the span holds " + std::to_string(samples.size()) +
                                " samples, initialization needs " + std::to_string(init));
  }
  auto est = Estimator::init(profile, model, samples.first(init), options);
  FitTrace t;
  const std::size_t rows = samples.size() - init + 1;
  t.k.reserve(rows);
  t.y.reserve(rows);
  t.yhat_full.reserve(rows);
  t.yhat_first.reserve(rows);
  t.residual.reserve(rows);
  t.condition.reserve(rows);
  auto record = [&](const Sample& s, std::size_t step) {
    const double full = model.predict(est.theta(), s.k);
    t.k.push_back(s.k);
    t.y.push_back(s.y);
    t.yhat_full.push_back(full);
    t.yhat_first.push_back(model.predict_first_harmonic(est.theta(), s.k));
    t.residual.push_back(s.y - full);
    t.condition.push_back(cond_every > 0 && step % cond_every == 0
                              ? condition_number(est.info_matrix())
                              : std::numeric_limits<double>::quiet_NaN());
  };
  record(samples[init - 1], 0);
  for (std::size_t i = init; i < samples.size(); ++i) {
    est.step(samples[i]);
    record(samples[i], i - init + 1);
  }
  t.summary = summarize(t.residual);
  t.loading_applied = est.loading_applied();
  t.reinit_count = est.reinit_count();
  if (final_state != nullptr) final_state->emplace(std::move(est));
  return t;
}

CoverageReport rolling_coverage(Estimator& est, std::span<const Sample> samples,
                                std::size_t first, std::size_t count, std::size_t horizon) {
  if (first == 0 || first + count > samples.size() || est.k() != samples[first - 1].k) {
    throw IndexGapError("rolling forecast must start right after the estimator's index");
  }
  CoverageReport r;
  for (std::size_t pos = first; pos < first + count;) {
    const std::size_t h = std::min(horizon, first + count - pos);
    const ForecastBand band = est.forecast(h);
    for (std::size_t tau = 0; tau < h; ++tau) {
      const double y = samples[pos + tau].y;
      ++r.forecasts;
      if (y >= band.points[tau].lower && y <= band.points[tau].upper) ++r.inside;
    }
    for (std::size_t tau = 0; tau < h; ++tau) est.step(samples[pos + tau]);
    pos += h;
  }
  r.fraction = r.forecasts ? static_cast<double>(r.inside) / static_cast<double>(r.forecasts) : 0.0;
  return r;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  const auto model = HarmonicModel::make(c.period, c.harmonics);
  const auto profile = make_profile(c, c.profile);
  const auto series = load_series(c);
  const auto trace = run_fit(profile, model, series.samples, estimator_options(c),
                             init_length(profile, c), c.cond_every);

  out << "k,date,y,yhat_full,yhat_first_harmonic,residual,cond_A\n";
  for (std::size_t i = 0; i < trace.k.size(); ++i) {
    out << trace.k[i] << ',' << format_date(series.date_of(trace.k[i])) << ',' << fmt(trace.y[i])
        << ',' << fmt(trace.yhat_full[i]) << ',' << fmt(trace.yhat_first[i]) << ','
        << fmt(trace.residual[i]) << ',' << cell(trace.condition[i]) << '\n';
  }
  meta(out, "command", "fit");
  meta_input(out, c, series);
  meta(out, "profile", profile.describe());
  meta_model(out, c, model);
  meta_estimator(out, c, trace);
  meta(out, "cond_every", std::to_string(c.cond_every));
  meta(out, "rows", std::to_string(trace.summary.rows));
  meta(out, "rmse", trace.summary.rmse);
  meta(out, "residual_mean", trace.summary.residual_mean);
  meta(out, "residual_std", trace.summary.residual_std);
  return 0;
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto model = HarmonicModel::make(c.period, c.harmonics);
  const auto primary = make_profile(c, c.profile);
  const auto baseline = make_profile(c, c.baseline);
  const auto series = load_series(c);
  const std::size_t init_a = init_length(primary, c);
  const std::size_t init_b = init_length(baseline, c);
  const auto a = run_fit(primary, model, series.samples, estimator_options(c), init_a, 0);
  const auto b = run_fit(baseline, model, series.samples, estimator_options(c), init_b, 0);

  // Score both over the indices where both have a fitted value.
  const std::size_t from = std::max(init_a, init_b);
  const std::size_t skip_a = from - init_a;
  const std::size_t skip_b = from - init_b;
  const std::size_t rows = a.k.size() - skip_a;
  const std::span<const double> ra = std::span(a.residual).subspan(skip_a);
  const std::span<const double> rb = std::span(b.residual).subspan(skip_b);
  const FitSummary sa = summarize(ra);
  const FitSummary sb = summarize(rb);
  const double ratio = sa.rmse / sb.rmse;

  out << "k,date,y,residual_profile,residual_baseline\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const std::int64_t k = a.k[skip_a + i];
    out << k << ',' << format_date(series.date_of(k)) << ',' << fmt(a.y[skip_a + i]) << ','
        << fmt(ra[i]) << ',' << fmt(rb[i]) << '\n';
  }

  double reach = 0.0;
  for (double v : ra) reach = std::max(reach, std::abs(v));
  for (double v : rb) reach = std::max(reach, std::abs(v));
  const double width = 2.0 * reach / static_cast<double>(kHistogramBins);
  std::vector<std::size_t> ca(kHistogramBins, 0);
  std::vector<std::size_t> cb(kHistogramBins, 0);
  auto bin_of = [&](double v) {
    if (!(width > 0.0)) return kHistogramBins / 2;
    const auto idx = static_cast<std::size_t>(std::floor((v + reach) / width));
    return std::min(idx, kHistogramBins - 1);
  };
  for (double v : ra) ++ca[bin_of(v)];
  for (double v : rb) ++cb[bin_of(v)];
  out << "\n# histogram\nbin_lower,bin_upper,count_profile,count_baseline\n";
  for (std::size_t i = 0; i < kHistogramBins; ++i) {
    const double lo = -reach + width * static_cast<double>(i);
    const double hi = i + 1 == kHistogramBins ? reach : lo + width;
    out << fmt(lo) << ',' << fmt(hi) << ',' << ca[i] << ',' << cb[i] << '\n';
  }

  meta(out, "command", "compare");
  meta_input(out, c, series);
  meta(out, "profile", primary.describe());
  meta(out, "baseline", baseline.describe());
  meta_model(out, c, model);
  meta(out, "epsilon", c.epsilon);
  meta(out, "reinit", std::to_string(c.reinit));
  meta(out, "rows", std::to_string(rows));
  meta(out, "histogram_bins", std::to_string(kHistogramBins));
  meta(out, "rmse_profile", sa.rmse);
  meta(out, "rmse_baseline", sb.rmse);
  meta(out, "residual_std_profile", sa.residual_std);
  meta(out, "residual_std_baseline", sb.residual_std);
  meta(out, "rmse_ratio", ratio);
  log << "rmse " << primary.describe() << " = " << fmt(sa.rmse) << ", " << baseline.describe()
      << " = " << fmt(sb.rmse) << ", ratio = " << fmt(ratio) << '\n';
  return 0;
}

int cmd_forecast(const RunConfig& c, std::ostream& out) {
  const auto model = HarmonicModel::make(c.period, c.harmonics);
  const auto profile = make_profile(c, c.profile);
  RunConfig full = c;
  full.end.reset();
  const auto series = load_series(full);
  std::size_t train = series.samples.size();
  if (c.end) {
    const std::int64_t k_end = series.index_of(parse_date(*c.end));
    if (k_end < 1 || k_end > static_cast<std::int64_t>(series.samples.size())) {
      throw RangeError("--end " + *c.end + " lies outside the data");
    }
    train = static_cast<std::size_t>(k_end);
  }
  std::optional<Estimator> est;
  const auto trace = run_fit(profile, model, std::span(series.samples).first(train),
                             estimator_options(c), init_length(profile, c), 0, &est);
  const ForecastBand band = est->forecast(c.horizon);

  std::size_t observed = 0;
  std::size_t inside = 0;
  out << "k,date,mean,lower,upper,observed,in_band\n";
  for (const auto& pt : band.points) {
    const Date date = series.date_of(pt.k);
    out << pt.k << ',' << format_date(date) << ',' << fmt(pt.mean) << ',' << fmt(pt.lower) << ','
        << fmt(pt.upper) << ',';
    const bool have = pt.k <= static_cast<std::int64_t>(series.samples.size()) &&
                      std::find(series.filled.begin(), series.filled.end(), date) ==
                          series.filled.end();
    if (have) {
      const double y = series.samples[static_cast<std::size_t>(pt.k - 1)].y;
      const bool in = y >= pt.lower && y <= pt.upper;
      ++observed;
      inside += in ? 1 : 0;
      out << fmt(y) << ',' << (in ? 1 : 0);
    } else {
      out << ',';
    }
    out << '\n';
  }
  meta(out, "command", "forecast");
  meta_input(out, c, series);
  meta(out, "train_end", format_date(series.date_of(static_cast<std::int64_t>(train))));
  meta(out, "profile", profile.describe());
  meta_model(out, c, model);
  meta_estimator(out, c, trace);
  meta(out, "horizon", std::to_string(c.horizon));
  meta(out, "sigma", band.sigma);
  meta(out, "observed", std::to_string(observed));
  meta(out, "coverage",
       observed ? fmt(static_cast<double>(inside) / static_cast<double>(observed))
                : std::string{"n/a"});
  return 0;
}

namespace {

std::vector<double> default_theta(const HarmonicModel& model) {
  // A temperate-climate shape: yearly swing plus a weak second harmonic.
  std::vector<double> theta(model.dimension(), 0.0);
  theta[0] = 7.0;
  theta[1] = -9.0;
  theta[2] = -3.0;
  if (model.harmonics() >= 1) {
    theta[3] = 0.8;
    theta[4] = 0.4;
  }
  return theta;
}

}  // namespace

int cmd_synth(const RunConfig& c, std::ostream& out) {
  const auto model = HarmonicModel::make(c.period, c.harmonics);
  const auto theta = c.theta.empty() ? default_theta(model) : c.theta;
  const Date origin = c.start ? parse_date(*c.start) : Date{std::chrono::year{2000} / 1 / 1};
  const auto samples = oracle::synth_generate({model, theta, c.noise, c.seed, c.length});

  meta(out, "command", "synth");
  meta(out, "period", c.period);
  meta(out, "harmonics", std::to_string(c.harmonics));
  meta(out, "parameters", std::to_string(model.dimension()));
  std::string list;
  for (double t : theta) list += (list.empty() ? "" : ";") + fmt(t);
  meta(out, "theta", list);
  meta(out, "noise", c.noise);
  meta(out, "seed", std::to_string(c.seed));
  meta(out, "length", std::to_string(c.length));
  meta(out, "start", format_date(origin));
  out << "date,value\n";
  const std::chrono::sys_days day0{origin};
  for (const auto& s : samples) {
    out << format_date(Date{day0 + std::chrono::days{s.k - 1}}) << ',' << fmt(s.y) << '\n';
  }
  return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  verify::Options opts;
  opts.seed = c.seed;
  if (c.trials) {
    opts.bias_trials = *c.trials;
    opts.accumulation_trials = *c.trials;
  }
  if (c.input) {
    opts.stockholm_path = *c.input;
    opts.stockholm_format = c.format;
    opts.value_column = c.value_column;
  }
  std::size_t failed = 0;
  std::size_t blocked = 0;
  for (auto id : verify::criterion_ids()) {
    const auto r = verify::run_criterion(id, opts);
    out << verify::format_line(r) << '\n' << std::flush;
    failed += r.status == verify::Status::fail ? 1 : 0;
    blocked += r.status == verify::Status::blocked ? 1 : 0;
  }
  out << "summary: " << verify::criterion_ids().size() - failed - blocked << " passed, " << failed
      << " failed, " << blocked << " blocked (seed " << c.seed << ")\n";
  return failed ? static_cast<int>(ExitCode::verification_failed) : 0;
}

}  // namespace swrls::app
