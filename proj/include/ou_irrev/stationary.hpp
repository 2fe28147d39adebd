#pragma once

// Stationary Gaussian law of a non-sweeping linear model and the
// thermodynamic quantities evaluated under it.

#include <span>

#include "ou_irrev/matrix.hpp"
#include "ou_irrev/model.hpp"

namespace ouirr {

/// Entropy production below this counts as zero.
inline constexpr double kEprZero = 1e-8;

struct FdrResiduals {
  /// ||B Xi + Xi B^T - A||_F / (1 + ||A||_F); vanishes for every stationary law.
  double standard = 0.0;
  /// ||A - 2 B Xi||_F / (1 + ||A||_F); vanishes iff the law is reversible.
  double strong = 0.0;
};

class StationaryLaw {
 public:
  /// Throws NoStationaryLawError when the model is sweeping.
  explicit StationaryLaw(LinearModel model);

  const LinearModel& model() const { return model_; }
  const Classification& classification() const { return classification_; }
  const Mat& Xi() const { return xi_; }
  const Mat& Xi_inv() const { return xi_inv_; }
  /// Lower Cholesky factor of Xi.
  const Mat& Xi_chol() const { return xi_chol_; }
  double epr() const { return epr_; }
  const FdrResiduals& fdr() const { return fdr_; }

 private:
  LinearModel model_;
  Classification classification_;
  Mat xi_;
  Mat xi_inv_;
  Mat xi_chol_;
  double epr_ = 0.0;
  FdrResiduals fdr_;
};

StationaryLaw stationary_law(const LinearModel& model);

/// 1/2 tr(M^T A M Xi) with M = 2 A^{-1} B - Xi^{-1}.
double entropy_production_rate(const StationaryLaw& law);

/// 2 tr(B^T A^{-1} B Xi) - tr(B); equals the epr in the stationary state.
double heat_dissipation_rate_stationary(const StationaryLaw& law);

/// R(tau) = E[x(t + tau) x(t)^T]: e^{-B tau} Xi for tau >= 0 and R(-tau)^T otherwise.
Mat two_time_covariance(const StationaryLaw& law, double tau);

struct ForceFlux {
  /// Thermodynamic force Pi(x) = 2 A^{-1} b(x) - grad log P(x).
  Vec affinity;
  /// 2 A^{-1} b(x)
  Vec mechanical_force;
  /// J(x) / P(x) = A Pi(x) / 2
  Vec flux_per_density;
  /// J(x) = P(x) A Pi(x) / 2
  Vec flux;
};

ForceFlux force_flux(const StationaryLaw& law, std::span<const double> x);

FdrResiduals fdr_residuals(const StationaryLaw& law);

double stationary_density(const StationaryLaw& law, std::span<const double> x);

}  // namespace ouirr
