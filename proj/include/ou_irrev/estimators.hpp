#pragma once

// Statistics over trajectory ensembles. Every estimator is a deterministic
// function of its batch and parameters: per-path partial results may be
// computed in parallel, but they are always combined in path order.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ou_irrev/matrix.hpp"
#include "ou_irrev/model.hpp"
#include "ou_irrev/sampler.hpp"

namespace ouirr {

struct MomentEstimate {
  Vec mean;
  Vec mean_se;
  Mat xi_hat;  // centered, symmetrized
  Mat xi_se;
  std::size_t samples = 0;
  std::size_t batches = 0;
  /// False when the second moment drifts between the first and last quarter of the window.
  bool converged = true;
  double drift_z = 0.0;
};

/// Time-and-ensemble moments after `burn_in`; standard errors by batch means.
/// Throws InsufficientDataError below 100 samples.
MomentEstimate empirical_moments(const TrajectoryBatch& batch, double burn_in);

struct TwoTimeEstimate {
  double lag = 0.0;
  Mat r_hat;  // E[x(t + lag) x(t)^T]
  Mat se;     // entrywise, across paths
  std::vector<Mat> per_path;
};

TwoTimeEstimate two_time_estimate(const TrajectoryBatch& batch, double lag, double burn_in = 0.0);
Mat empirical_two_time(const TrajectoryBatch& batch, double lag, double burn_in = 0.0);

struct ReversibilityOptions {
  double burn_in = 0.0;
  std::size_t bootstrap_resamples = 200;
  /// 0 derives the bootstrap seed from the batch seed.
  std::uint64_t bootstrap_seed = 0;
  double threshold = 3.0;
};

struct ReversibilityResult {
  /// max over lags of ||D|| / se(D), D = R_hat - R_hat^T
  double statistic = 0.0;
  double threshold = 3.0;
  /// Failure to reject reversibility; not a proof of it.
  bool reversible = true;
  std::vector<double> lags;
  std::vector<double> per_lag;
};

/// Second-order time-reversal symmetry test. se(D) is the bootstrap root-mean-square of
/// ||D* - D||_F over path resamples.
ReversibilityResult reversibility_test(const TrajectoryBatch& batch, std::span<const double> lags,
                                       const ReversibilityOptions& options = {});

struct HeatRateEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t paths = 0;
};

/// Mean of (W(T) - W(burn_in)) / (T - burn_in) over paths.
HeatRateEstimate hdr_estimate(const TrajectoryBatch& batch, double burn_in = 0.0);

struct GreenKuboResult {
  std::vector<double> checkpoints;
  /// max_t ||mean(t) - e^{-Bt} x0|| / (1 + ||x0||)
  double max_deviation = 0.0;
  /// max_t,i |mean_i(t) - (e^{-Bt} x0)_i| / se_i
  double max_z = 0.0;
  bool has_stationary = false;
  /// max_t,ij |R_hat_ij(t) - (e^{-Bt} Xi)_ij| / se_ij
  double stationary_max_z = 0.0;
  double z_limit = 4.0;
  bool pass = true;
};

/// `conditional` must share one start x0. `stationary`, when given, adds the R(t, 0)
/// regression check against e^{-Bt} Xi.
GreenKuboResult greenkubo_check(const TrajectoryBatch& conditional, const LinearModel& model,
                                std::span<const double> checkpoints,
                                const TrajectoryBatch* stationary = nullptr, double burn_in = 0.0,
                                double z_limit = 4.0);

struct EstimateReport {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  double dt = 0.0;
  double burn_in = 0.0;
  MomentEstimate moments;
  std::map<double, Mat> r_hat;
  HeatRateEstimate hdr;
  ReversibilityResult asymmetry;
  GreenKuboResult green_kubo;
  bool verdict_reversible = true;
  std::string confidence_note;
};

EstimateReport estimate_report(const LinearModel& model, const TrajectoryBatch& stationary,
                               const TrajectoryBatch& conditional, std::span<const double> lags,
                               double burn_in, const ReversibilityOptions& options = {});

}  // namespace ouirr
