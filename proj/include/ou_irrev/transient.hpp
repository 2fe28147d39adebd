#pragma once

// Exact time-dependent Gaussian law started from a point, with entropy,
// free energy and instantaneous entropy-production / heat rates.

#include <optional>
#include <span>

#include "ou_irrev/matrix.hpp"
#include "ou_irrev/model.hpp"
#include "ou_irrev/stationary.hpp"

namespace ouirr {

struct GaussianState {
  double t = 0.0;
  Vec mean;
  Mat cov;
};

/// mean = e^{-Bt} x0, cov = int_0^t e^{-Bs} A e^{-B^T s} ds. Valid for any B.
GaussianState propagate(const LinearModel& model, std::span<const double> x0, double t);

/// Gaussian density p(x, t | x0); t must be positive.
double transition_density(const LinearModel& model, std::span<const double> x, double t,
                          std::span<const double> x0);

/// -int P log P; throws UndefinedEntropyError when cov is singular.
double entropy(const GaussianState& state);

/// U(x) = x^T A^{-1} B x, so that 2 A^{-1} b = -grad U. Throws PotentialUndefinedError unless
/// the model is reversible.
double potential(const LinearModel& model, std::span<const double> x);

/// E[U] - entropy. Reversible models only.
double free_energy(const LinearModel& model, const GaussianState& state);

struct ThermoSnapshot {
  double t = 0.0;
  double entropy = 0.0;
  std::optional<double> free_energy;  // reversible models only
  double epr_t = 0.0;
  double hdr_t = 0.0;
  /// epr_t - hdr_t
  double entropy_rate = 0.0;
};

ThermoSnapshot instantaneous_rates(const LinearModel& model, const GaussianState& state);

/// KL(state || stationary law); nonincreasing in t.
double relative_entropy(const StationaryLaw& law, const GaussianState& state);

}  // namespace ouirr
