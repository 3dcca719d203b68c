// SPDX-License-Identifier: Apache-2.0
#include "swrls/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "swrls/densela.hpp"
#include "swrls/error.hpp"

namespace swrls::oracle {

// ---------------------------------------------------------------------------
// Random numbers

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

}  // namespace

std::uint64_t CounterRng::next_u64() noexcept {
  return splitmix64(seed_ ^ splitmix64(counter_++));
}

double CounterRng::uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11U) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) + 0x632BE59BD9B4E019ULL * (index + 1));
}

std::vector<Sample> synth_generate(const SyntheticSpec& spec) {
  if (spec.theta_star.size() != spec.model.dimension()) {
    throw DimensionError("theta* length does not match the model dimension");
  }
  CounterRng rng(spec.seed);
  std::vector<Sample> out;
  out.reserve(spec.length);
  for (std::size_t i = 0; i < spec.length; ++i) {
    const std::int64_t k = spec.first_index + static_cast<std::int64_t>(i);
    double y = spec.model.predict(spec.theta_star, k);
    if (spec.noise_sigma > 0.0) y += spec.noise_sigma * rng.normal();
    out.push_back({k, y});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extended-precision dense helpers

namespace {

template <class T>
T abs_of(T v) {
  return v < T(0) ? -v : v;
}

/// In-place Gauss-Jordan inverse of a row-major n x n matrix.
template <class T>
std::vector<T> gauss_jordan(std::vector<T> a, std::size_t n) {
  std::vector<T> inv(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = T(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs_of(a[r * n + c]) > abs_of(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == T(0)) throw SingularUpdateError("direct inverse: singular matrix");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[c * n + j]);
        std::swap(inv[piv * n + j], inv[c * n + j]);
      }
    }
    const T d = a[c * n + c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c * n + j] /= d;
      inv[c * n + j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = a[r * n + c];
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[c * n + j];
        inv[r * n + j] -= f * inv[c * n + j];
      }
    }
  }
  return inv;
}

template <class T>
std::vector<T> widen(const Matrix& m) {
  std::vector<T> out(m.rows() * m.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(m.values()[i]);
  return out;
}

template <class T>
Matrix narrow(const std::vector<T>& v, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < v.size(); ++i) m.values()[i] = static_cast<double>(v[i]);
  return m;
}

#if defined(__SIZEOF_FLOAT128__)
using Quad = __float128;
#else
using Quad = long double;
#endif

struct Assembly {
  std::size_t n;
  std::vector<long double> a;
  std::vector<long double> b;
};

Assembly assemble(const ForgettingProfile& profile, const HarmonicModel& model,
                  std::span<const Sample> samples, std::int64_t k,
                  std::span<const std::size_t> lag_order) {
  const std::size_t n = model.dimension();
  Assembly out{n, std::vector<long double>(n * n, 0.0L), std::vector<long double>(n, 0.0L)};
  const std::int64_t base = samples.front().k;
  std::vector<double> phi(n);
  for (std::size_t j : lag_order) {
    const std::int64_t idx = k - static_cast<std::int64_t>(j);
    const Sample& s = samples[static_cast<std::size_t>(idx - base)];
    model.regressor_at(idx, phi);
    const long double f = profile.weight(j);
    for (std::size_t r = 0; r < n; ++r) {
      const long double fr = f * phi[r];
      out.b[r] += fr * s.y;
      for (std::size_t c = 0; c < n; ++c) out.a[r * n + c] += fr * phi[c];
    }
  }
  return out;
}

std::vector<long double> cholesky_solve(const std::vector<long double>& a,
                                        std::vector<long double> b, std::size_t n) {
  std::vector<long double> l(n * n, 0.0L);
  for (std::size_t j = 0; j < n; ++j) {
    long double d = a[j * n + j];
    for (std::size_t c = 0; c < j; ++c) d -= l[j * n + c] * l[j * n + c];
    if (!(d > 0.0L)) {
      throw NotPositiveDefiniteError("oracle: weighted information matrix is not positive definite");
    }
    const long double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      long double v = a[i * n + j];
      for (std::size_t c = 0; c < j; ++c) v -= l[i * n + c] * l[j * n + c];
      l[i * n + j] = v / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < i; ++c) b[i] -= l[i * n + c] * b[c];
    b[i] /= l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t c = i + 1; c < n; ++c) b[i] -= l[c * n + i] * b[c];
    b[i] /= l[i * n + i];
  }
  return b;
}

/// Lower Cholesky factor of a positive definite matrix, in long double.
std::vector<long double> cholesky_lower(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<long double> l(n * n, 0.0L);
  for (std::size_t j = 0; j < n; ++j) {
    long double d = a(j, j);
    for (std::size_t c = 0; c < j; ++c) d -= l[j * n + c] * l[j * n + c];
    if (!(d > 0.0L)) throw NotPositiveDefiniteError("oracle: matrix is not positive definite");
    l[j * n + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      long double v = a(i, j);
      for (std::size_t c = 0; c < j; ++c) v -= l[i * n + c] * l[j * n + c];
      l[i * n + j] = v / l[j * n + j];
    }
  }
  return l;
}

std::vector<std::size_t> natural_lags(const ForgettingProfile& profile,
                                      std::span<const Sample> samples, std::int64_t k) {
  std::vector<std::size_t> lags(contributing_lags(profile, samples, k));
  std::iota(lags.begin(), lags.end(), std::size_t{0});
  return lags;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::size_t contributing_lags(const ForgettingProfile& profile, std::span<const Sample> samples,
                              std::int64_t k) {
  if (samples.empty()) throw RangeError("oracle: no samples");
  const std::int64_t base = samples.front().k;
  if (k < base || k > samples.back().k) throw RangeError("oracle: index outside the samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].k != samples[i - 1].k + 1) throw IndexGapError("oracle: samples not consecutive");
  }
  const bool bounded = profile.window().has_value();
  std::size_t j = 0;
  for (; k - static_cast<std::int64_t>(j) >= base; ++j) {
    const double f = profile.weight(j);
    if (f == 0.0) break;
    if (!bounded && f < 1e-18) break;
  }
  return j;
}

WeightedLsSolution direct_weighted_ls_ordered(const ForgettingProfile& profile,
                                              const HarmonicModel& model,
                                              std::span<const Sample> samples, std::int64_t k,
                                              std::span<const std::size_t> lag_order) {
  const std::size_t lags = contributing_lags(profile, samples, k);
  std::vector<bool> seen(lags, false);
  for (std::size_t j : lag_order) {
    if (j >= lags || seen[j]) throw RangeError("oracle: lag order is not a permutation");
    seen[j] = true;
  }
  if (lag_order.size() != lags) throw RangeError("oracle: lag order is not a permutation");
  const Assembly as = assemble(profile, model, samples, k, lag_order);
  const auto theta_ld = cholesky_solve(as.a, as.b, as.n);
  WeightedLsSolution out{SymMatrix::from(narrow(as.a, as.n, as.n)),
                         std::vector<double>(as.n)};
  for (std::size_t i = 0; i < as.n; ++i) out.theta[i] = static_cast<double>(theta_ld[i]);
  return out;
}

WeightedLsSolution direct_weighted_ls(const ForgettingProfile& profile,
                                      const HarmonicModel& model,
                                      std::span<const Sample> samples, std::int64_t k) {
  const auto lags = natural_lags(profile, samples, k);
  return direct_weighted_ls_ordered(profile, model, samples, k, lags);
}

Matrix direct_inverse(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("direct inverse of a non-square matrix");
  return narrow(gauss_jordan(widen<long double>(a), a.rows()), a.rows(), a.cols());
}

// ---------------------------------------------------------------------------
// Trajectory comparison

namespace {

std::size_t init_length_for(const ForgettingProfile& profile, const HarmonicModel& model,
                            const TrajectoryOptions& options) {
  if (const auto w = profile.window()) return *w;
  return options.init_length > 0 ? options.init_length : 4 * model.dimension();
}

}  // namespace

TrajectoryReport compare_trajectory(const ForgettingProfile& profile, const HarmonicModel& model,
                                    std::span<const Sample> samples,
                                    const TrajectoryOptions& options) {
  const std::size_t init = init_length_for(profile, model, options);
  if (samples.size() < init + 10) {
    throw RangeError("trajectory comparison needs at least window + 10 samples");
  }
  TrajectoryReport report;
  auto est = Estimator::init(profile, model, samples.first(init), options.estimator);

  auto record = [&](std::size_t step_no) {
    const std::int64_t k = est.k();
    const auto lags = natural_lags(profile, samples, k);
    const Assembly as = assemble(profile, model, samples, k, lags);
    const auto theta_ld = cholesky_solve(as.a, as.b, as.n);
    std::vector<double> diff(as.n);
    std::vector<double> ref(as.n);
    for (std::size_t i = 0; i < as.n; ++i) {
      ref[i] = static_cast<double>(theta_ld[i]);
      diff[i] = static_cast<double>(static_cast<long double>(est.theta()[i]) - theta_ld[i]);
    }
    const double ref_norm = norm2(ref);
    const double dtheta = ref_norm > 0.0 ? norm2(diff) / ref_norm : norm2(diff);

    const auto gamma_ref = gauss_jordan(as.a, as.n);
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t i = 0; i < as.n * as.n; ++i) {
      const long double d = static_cast<long double>(est.gamma().full().values()[i]) - gamma_ref[i];
      num += d * d;
      den += gamma_ref[i] * gamma_ref[i];
    }
    const double dgamma = static_cast<double>(std::sqrt(num / den));

    report.index.push_back(k);
    report.theta_deviation.push_back(dtheta);
    report.gamma_deviation.push_back(dgamma);
    if (dtheta > report.max_theta_deviation) {
      report.max_theta_deviation = dtheta;
      report.worst_theta_index = k;
    }
    if (dgamma > report.max_gamma_deviation) {
      report.max_gamma_deviation = dgamma;
      report.worst_gamma_index = k;
    }
    if (options.cond_every > 0 && step_no % options.cond_every == 0) {
      report.condition.push_back(condition_number(SymMatrix::from(narrow(as.a, as.n, as.n))));
    }
  };

  record(0);
  for (std::size_t i = init; i < samples.size(); ++i) {
    est.step(samples[i]);
    record(i - init + 1);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Monte-Carlo bias

BiasReport monte_carlo_bias(const ForgettingProfile& profile, const SyntheticSpec& spec,
                            std::size_t trials, std::int64_t k, const TrajectoryOptions& options) {
  if (trials < 100) throw RangeError("Monte-Carlo bias needs at least 100 trials");
  const std::size_t init = init_length_for(profile, spec.model, options);
  const auto length = static_cast<std::size_t>(k - spec.first_index + 1);
  if (length < init) throw RangeError("Monte-Carlo index k lies inside the initial window");

  const std::size_t n = spec.model.dimension();
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    SyntheticSpec trial = spec;
    trial.seed = derive_seed(spec.seed, t);
    trial.length = length;
    const auto samples = synth_generate(trial);
    auto est = Estimator::init(profile, spec.model, std::span(samples).first(init), options.estimator);
    for (std::size_t i = init; i < samples.size(); ++i) est.step(samples[i]);
    // Welford
    const double count = static_cast<double>(t + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = est.theta()[i] - spec.theta_star[i];
      const double delta = x - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (x - mean[i]);
    }
  }
  BiasReport report{mean, std::vector<double>(n), trials, 0.0};
  const double tr = static_cast<double>(trials);
  for (std::size_t i = 0; i < n; ++i) {
    report.standard_error[i] = std::sqrt(m2[i] / (tr - 1.0)) / std::sqrt(tr);
    if (report.standard_error[i] > 0.0) {
      report.max_z = std::max(report.max_z, std::abs(mean[i]) / report.standard_error[i]);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Round-off accumulation: batch Woodbury vs chained Sherman-Morrison

std::pair<Matrix, Matrix> conditioned_spd(std::size_t n, double cond, CounterRng& rng) {
  // Random orthogonal basis by modified Gram-Schmidt (twice) in long double.
  std::vector<long double> v(n * n);
  for (auto& x : v) x = rng.normal();
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        long double d = 0.0L;
        for (std::size_t r = 0; r < n; ++r) d += v[r * n + c] * v[r * n + prev];
        for (std::size_t r = 0; r < n; ++r) v[r * n + c] -= d * v[r * n + prev];
      }
      long double norm = 0.0L;
      for (std::size_t r = 0; r < n; ++r) norm += v[r * n + c] * v[r * n + c];
      norm = std::sqrt(norm);
      for (std::size_t r = 0; r < n; ++r) v[r * n + c] /= norm;
    }
  }
  std::vector<long double> eig(n, 1.0L);
  for (std::size_t i = 0; i < n && n > 1; ++i) {
    eig[i] = std::pow(static_cast<long double>(cond),
                      static_cast<long double>(i) / static_cast<long double>(n - 1));
  }
  Matrix b(n, n);
  Matrix b_inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0.0L;
      long double si = 0.0L;
      for (std::size_t c = 0; c < n; ++c) {
        const long double vv = v[i * n + c] * v[j * n + c];
        s += vv * eig[c];
        si += vv / eig[c];
      }
      b(i, j) = static_cast<double>(s);
      b_inv(i, j) = static_cast<double>(si);
    }
  }
  return {SymMatrix::from(b).full(), SymMatrix::from(b_inv).full()};
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double x) { return std::isnan(x); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

AccumulationReport accumulation_experiment(std::size_t n, std::size_t columns,
                                           double cond_target, std::size_t trials,
                                           std::uint64_t seed) {
  if (!(cond_target >= 1.0)) throw RangeError("target condition number must be >= 1");
  if (columns == 0 || n == 0) throw RangeError("accumulation experiment needs n, columns >= 1");
  AccumulationReport report;
  const std::size_t removals = columns / 2;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(derive_seed(seed, t));
    const auto [b, b_inv_full] = conditioned_spd(n, cond_target, rng);
    const SymMatrix b_inv = SymMatrix::from(b_inv_full);
    const std::vector<long double> root = cholesky_lower(b);

    // Columns are drawn like regressors of the data that built B
    // (x = L z with L L^T = B), so they excite its weak directions too.
    LowRankBatch batch(n, columns);
    std::vector<double> z(n);
    for (std::size_t l = 0; l < columns; ++l) {
      auto col = batch.column(l);
      for (auto& x : z) x = rng.normal();
      for (std::size_t i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (std::size_t c = 0; c <= i; ++c) acc += root[i * n + c] * z[c];
        col[i] = static_cast<double>(acc);
      }
      if (l % 2 == 1) {
        // Removal sized so that sum_l y_l^T B^{-1} y_l = 1/2 keeps A positive definite.
        const auto by = b_inv.full() * std::span<const double>(col);
        const double quad = std::inner_product(col.begin(), col.end(), by.begin(), 0.0);
        const double target = 0.5 / static_cast<double>(removals);
        const double s = std::sqrt(target / quad);
        for (auto& x : col) x *= s;
        batch.set_sign(l, -1);
      }
    }

    // Reference: the exact problem posed by the double inputs, i.e.
    // inv(inv(B^{-1}) + Q D Q^T), evaluated in quad precision.
    std::vector<Quad> b_exact = gauss_jordan(widen<Quad>(b_inv.full()), n);
    for (std::size_t l = 0; l < columns; ++l) {
      const auto col = batch.column(l);
      const Quad s = static_cast<Quad>(batch.sign(l));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          b_exact[i * n + j] += s * static_cast<Quad>(col[i]) * static_cast<Quad>(col[j]);
    }
    const Matrix reference = narrow(gauss_jordan(std::move(b_exact), n), n, n);

    const Matrix raw = batch_inverse_update_raw(b_inv, batch);
    report.batch_asymmetry.push_back(relative_asymmetry(raw));
    report.batch_error.push_back(relative_frobenius_error(symmetrized(Matrix(raw)).full(), reference));
    try {
      const Matrix chain = chain_sherman_morrison(b_inv, batch);
      report.chain_asymmetry.push_back(relative_asymmetry(chain));
      report.chain_error.push_back(relative_frobenius_error(chain, reference));
    } catch (const IntermediateSingularityError&) {
      ++report.singular_incidents;
      report.chain_asymmetry.push_back(std::numeric_limits<double>::quiet_NaN());
      report.chain_error.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  report.median_batch_error = median(report.batch_error);
  report.median_chain_error = median(report.chain_error);
  report.median_batch_asymmetry = median(report.batch_asymmetry);
  report.median_chain_asymmetry = median(report.chain_asymmetry);
  return report;
}

}  // namespace swrls::oracle
