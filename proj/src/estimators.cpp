#include "ou_irrev/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ou_irrev/error.hpp"
#include "ou_irrev/stationary.hpp"

namespace ouirr {

namespace {

constexpr std::size_t kMinSamples = 100;

std::size_t burn_index(const TrajectoryBatch& batch, double burn_in) {
  if (!(burn_in >= 0.0)) throw ArgumentError("burn_in must be >= 0");
  return static_cast<std::size_t>(std::ceil(burn_in / batch.dt - 1e-9));
}

std::size_t lag_index(double dt, double lag) {
  if (!(lag >= 0.0)) throw ArgumentError("lag must be >= 0");
  const double r = lag / dt;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-6) {
    throw ArgumentError("lag " + std::to_string(lag) + " is not a multiple of dt");
  }
  return static_cast<std::size_t>(k);
}

void require_paths(const TrajectoryBatch& batch, std::size_t min_paths, const char* what) {
  if (batch.paths.size() < min_paths) {
    throw InsufficientDataError(std::string(what) + ": need at least " +
                                std::to_string(min_paths) + " paths");
  }
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Neumaier-compensated mean with standard error of the mean.
MeanSe mean_se(std::span<const double> v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  const double n = static_cast<double>(v.size());
  MeanSe r;
  r.mean = (sum + comp) / n;
  if (v.size() < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (n - 1.0) / n);
  return r;
}

// Column `c` of a row-major table with `width` columns.
std::vector<double> column(const std::vector<double>& table, std::size_t width, std::size_t c) {
  std::vector<double> out(table.size() / width);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = table[r * width + c];
  return out;
}

// Per-path sum over k in [k_begin, k_end) of x_{k+lag} x_k^T.
Mat lagged_sum(const Trajectory& tr, std::size_t k_begin, std::size_t k_end, std::size_t lag) {
  const std::size_t n = tr.n;
  Mat s(n);
  for (std::size_t k = k_begin; k < k_end; ++k) {
    const double* a = tr.states.data() + (k + lag) * n;
    const double* b = tr.states.data() + k * n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) += a[i] * b[j];
  }
  return s;
}

}  // namespace

MomentEstimate empirical_moments(const TrajectoryBatch& batch, double burn_in) {
  require_paths(batch, 1, "empirical_moments");
  const std::size_t n = batch.n;
  const std::size_t k0 = burn_index(batch, burn_in);
  const std::size_t len = batch.steps() + 1;
  const std::size_t per_path = len > k0 ? len - k0 : 0;
  const std::size_t paths = batch.paths.size();
  MomentEstimate est;
  est.samples = per_path * paths;
  if (est.samples < kMinSamples) {
    throw InsufficientDataError("empirical_moments: only " + std::to_string(est.samples) +
                                " samples after burn-in (need " + std::to_string(kMinSamples) +
                                ")");
  }

  // Batch means: each path cut into enough consecutive blocks to give >= 20 batches.
  const std::size_t blocks = std::min(per_path, std::max<std::size_t>(1, (20 + paths - 1) / paths));
  const std::size_t width = n + n * n;
  std::vector<double> batch_stats(paths * blocks * width, 0.0);
  // Four time windows per path for the drift check (trace of the raw second moment).
  std::vector<double> windows(paths * 4, 0.0);

  const auto count = static_cast<std::int64_t>(paths);
#pragma omp parallel for schedule(static) num_threads(resolve_threads())
  for (std::int64_t pi = 0; pi < count; ++pi) {
    const auto p = static_cast<std::size_t>(pi);
    const Trajectory& tr = batch.paths[p];
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t lo = k0 + b * per_path / blocks;
      const std::size_t hi = k0 + (b + 1) * per_path / blocks;
      double* out = batch_stats.data() + (p * blocks + b) * width;
      for (std::size_t k = lo; k < hi; ++k) {
        const auto x = tr.state(k);
        for (std::size_t i = 0; i < n; ++i) {
          out[i] += x[i];
          for (std::size_t j = 0; j < n; ++j) out[n + i * n + j] += x[i] * x[j];
        }
      }
      for (std::size_t c = 0; c < width; ++c) out[c] /= static_cast<double>(hi - lo);
    }
    for (std::size_t w = 0; w < 4; ++w) {
      const std::size_t lo = k0 + w * per_path / 4;
      const std::size_t hi = k0 + (w + 1) * per_path / 4;
      double s = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const auto x = tr.state(k);
        for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
      }
      windows[p * 4 + w] = hi > lo ? s / static_cast<double>(hi - lo) : 0.0;
    }
  }

  est.batches = paths * blocks;
  // Batch sizes differ by at most one sample, so the plain average of batch means is used.
  est.mean.resize(n);
  est.mean_se.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MeanSe m = mean_se(column(batch_stats, width, i));
    est.mean[i] = m.mean;
    est.mean_se[i] = m.se;
  }
  Mat raw(n);
  est.xi_se = Mat(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const MeanSe m = mean_se(column(batch_stats, width, n + i * n + j));
      raw(i, j) = m.mean;
      est.xi_se(i, j) = m.se;
    }
  }
  est.xi_hat = Mat(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) est.xi_hat(i, j) = raw(i, j) - est.mean[i] * est.mean[j];
  est.xi_hat = est.xi_hat.symmetrized();

  if (paths >= 2 && per_path >= 8) {
    const MeanSe first = mean_se(column(windows, 4, 0));
    const MeanSe last = mean_se(column(windows, 4, 3));
    const double se = std::hypot(first.se, last.se);
    est.drift_z = se > 0.0 ? std::abs(last.mean - first.mean) / se : 0.0;
    est.converged = est.drift_z <= 5.0;
  }
  return est;
}

TwoTimeEstimate two_time_estimate(const TrajectoryBatch& batch, double lag, double burn_in) {
  require_paths(batch, 1, "two_time_estimate");
  const std::size_t n = batch.n;
  const std::size_t k0 = burn_index(batch, burn_in);
  const std::size_t l = lag_index(batch.dt, lag);
  const std::size_t steps = batch.steps();
  if (k0 + l > steps) {
    throw ArgumentError("lag " + std::to_string(lag) + " exceeds the trajectory span after burn-in");
  }
  const std::size_t count = steps - l - k0 + 1;

  TwoTimeEstimate est;
  est.lag = lag;
  est.per_path.resize(batch.paths.size());
  const auto paths = static_cast<std::int64_t>(batch.paths.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads())
  for (std::int64_t p = 0; p < paths; ++p) {
    Mat s = lagged_sum(batch.paths[static_cast<std::size_t>(p)], k0, k0 + count, l);
    s *= 1.0 / static_cast<double>(count);
    est.per_path[static_cast<std::size_t>(p)] = std::move(s);
  }

  est.r_hat = Mat(n);
  est.se = Mat(n);
  std::vector<double> v(est.per_path.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t p = 0; p < v.size(); ++p) v[p] = est.per_path[p](i, j);
      const MeanSe m = mean_se(v);
      est.r_hat(i, j) = m.mean;
      est.se(i, j) = m.se;
    }
  }
  return est;
}

Mat empirical_two_time(const TrajectoryBatch& batch, double lag, double burn_in) {
  if (lag == 0.0) return empirical_moments(batch, burn_in).xi_hat;
  return two_time_estimate(batch, lag, burn_in).r_hat;
}

ReversibilityResult reversibility_test(const TrajectoryBatch& batch, std::span<const double> lags,
                                       const ReversibilityOptions& options) {
  if (lags.size() < 2) throw ArgumentError("reversibility_test: need at least two lags");
  require_paths(batch, 2, "reversibility_test");
  if (options.bootstrap_resamples < 2) {
    throw ArgumentError("reversibility_test: need at least two bootstrap resamples");
  }
  const std::size_t n = batch.n;
  const std::size_t paths = batch.paths.size();

  ReversibilityResult res;
  res.threshold = options.threshold;
  res.lags.assign(lags.begin(), lags.end());

  // Antisymmetric parts D_p(tau) = R_p - R_p^T, one per path and lag.
  std::vector<std::vector<Mat>> d(lags.size());
  for (std::size_t li = 0; li < lags.size(); ++li) {
    TwoTimeEstimate est = two_time_estimate(batch, lags[li], options.burn_in);
    d[li].reserve(paths);
    for (const Mat& r : est.per_path) d[li].push_back(r - r.transposed());
  }

  const std::uint64_t seed =
      options.bootstrap_seed != 0 ? options.bootstrap_seed : batch.seed ^ 0x9E3779B97F4A7C15ULL;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> resamples(options.bootstrap_resamples,
                                                  std::vector<std::size_t>(paths));
  for (auto& idx : resamples)
    for (auto& i : idx) i = static_cast<std::size_t>(rng() % paths);

  for (std::size_t li = 0; li < lags.size(); ++li) {
    Mat mean(n);
    for (const Mat& m : d[li]) mean += m;
    mean *= 1.0 / static_cast<double>(paths);
    double ss = 0.0;
    for (const auto& idx : resamples) {
      Mat star(n);
      for (std::size_t i : idx) star += d[li][i];
      star *= 1.0 / static_cast<double>(paths);
      const double dev = (star - mean).frobenius();
      ss += dev * dev;
    }
    const double se = std::sqrt(ss / static_cast<double>(resamples.size()));
    const double norm = mean.frobenius();
    const double stat = se > 0.0 ? norm / se : (norm > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    res.per_lag.push_back(stat);
  }
  res.statistic = *std::max_element(res.per_lag.begin(), res.per_lag.end());
  res.reversible = res.statistic < res.threshold;
  return res;
}

HeatRateEstimate hdr_estimate(const TrajectoryBatch& batch, double burn_in) {
  require_paths(batch, 2, "hdr_estimate");
  const std::size_t k0 = burn_index(batch, burn_in);
  const std::size_t kend = batch.steps();
  if (k0 >= kend) throw InsufficientDataError("hdr_estimate: burn-in covers the whole trajectory");
  const double span = batch.paths.front().time(kend) - batch.paths.front().time(k0);
  std::vector<double> rates(batch.paths.size());
  for (std::size_t p = 0; p < rates.size(); ++p) {
    const Trajectory& tr = batch.paths[p];
    rates[p] = (tr.heat[kend] - tr.heat[k0]) / span;
  }
  const MeanSe m = mean_se(rates);
  return {m.mean, m.se, rates.size()};
}

GreenKuboResult greenkubo_check(const TrajectoryBatch& conditional, const LinearModel& model,
                                std::span<const double> checkpoints,
                                const TrajectoryBatch* stationary, double burn_in,
                                double z_limit) {
  require_paths(conditional, 2, "greenkubo_check");
  const std::size_t n = conditional.n;
  if (n != model.dim()) throw ArgumentError("greenkubo_check: batch and model dimensions differ");
  const auto x0 = conditional.paths.front().state(0);
  for (const Trajectory& tr : conditional.paths) {
    const auto s = tr.state(0);
    if (!std::equal(s.begin(), s.end(), x0.begin())) {
      throw ArgumentError("greenkubo_check: conditional paths must share x0");
    }
  }
  const double x0_scale = 1.0 + norm2(x0);

  GreenKuboResult res;
  res.z_limit = z_limit;
  res.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  std::vector<double> v(conditional.paths.size());
  for (double t : checkpoints) {
    const std::size_t k = lag_index(conditional.dt, t);
    if (k > conditional.steps()) {
      throw ArgumentError("greenkubo_check: checkpoint beyond trajectory span");
    }
    const Vec pred = expm(-t * model.B()) * x0;
    Vec dev(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < v.size(); ++p) v[p] = conditional.paths[p].state(k)[i];
      const MeanSe m = mean_se(v);
      dev[i] = m.mean - pred[i];
      const double z = m.se > 0.0 ? std::abs(dev[i]) / m.se
                                  : (dev[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      res.max_z = std::max(res.max_z, z);
    }
    res.max_deviation = std::max(res.max_deviation, norm2(dev) / x0_scale);
  }

  if (stationary != nullptr) {
    res.has_stationary = true;
    const StationaryLaw law(model);
    for (double t : checkpoints) {
      const TwoTimeEstimate est = two_time_estimate(*stationary, t, burn_in);
      const Mat target = two_time_covariance(law, t);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double dev = std::abs(est.r_hat(i, j) - target(i, j));
          const double se = est.se(i, j);
          const double z =
              se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
          res.stationary_max_z = std::max(res.stationary_max_z, z);
        }
      }
    }
  }
  res.pass = res.max_z <= z_limit && (!res.has_stationary || res.stationary_max_z <= z_limit);
  return res;
}

EstimateReport estimate_report(const LinearModel& model, const TrajectoryBatch& stationary,
                               const TrajectoryBatch& conditional, std::span<const double> lags,
                               double burn_in, const ReversibilityOptions& options) {
  EstimateReport rep;
  rep.n_paths = stationary.paths.size();
  rep.n_steps = stationary.steps();
  rep.dt = stationary.dt;
  rep.burn_in = burn_in;
  rep.moments = empirical_moments(stationary, burn_in);
  for (double lag : lags) rep.r_hat[lag] = empirical_two_time(stationary, lag, burn_in);
  rep.hdr = hdr_estimate(stationary, burn_in);
  ReversibilityOptions opts = options;
  opts.burn_in = burn_in;
  rep.asymmetry = reversibility_test(stationary, lags, opts);
  rep.green_kubo = greenkubo_check(conditional, model, lags, &stationary, burn_in);
  rep.verdict_reversible = rep.asymmetry.reversible;
  rep.confidence_note =
      rep.verdict_reversible
          ? "no time-reversal asymmetry detected at the chosen threshold (failure to reject)"
          : "time-reversal asymmetry detected above the threshold";
  return rep;
}

}  // namespace ouirr
