#include "ou_irrev/stationary.hpp"

#include <cmath>
#include <numbers>

#include "ou_irrev/error.hpp"

namespace ouirr {

namespace {

// M = 2 A^{-1} B - Xi^{-1}; grad log P - 2 A^{-1} b = M x under the stationary law.
Mat force_defect(const LinearModel& model, const Mat& xi_inv) {
  return 2.0 * model.A_inv_B() - xi_inv;
}

}  // namespace

StationaryLaw::StationaryLaw(LinearModel model)
    : model_(std::move(model)), classification_(classify(model_)) {
  if (classification_.verdict == Verdict::Sweeping) {
    throw NoStationaryLawError(
        "model is sweeping: B has an eigenvalue with non-positive real part (min Re = " +
        std::to_string(classification_.spectrum_B.min_real_part) +
        "), so no stationary law exists");
  }
  xi_ = solve_lyapunov(model_.B(), model_.A());
  auto chol = try_cholesky(xi_);
  if (!chol) throw NumericalError("stationary covariance is not positive definite");
  xi_chol_ = *std::move(chol);
  xi_inv_ = spd_inverse(xi_);

  const Mat m = force_defect(model_, xi_inv_);
  epr_ = 0.5 * (m.transposed() * model_.A() * m * xi_).trace();

  const Mat& a = model_.A();
  const double scale = 1.0 + a.frobenius();
  fdr_.standard = (model_.B() * xi_ + xi_ * model_.B().transposed() - a).frobenius() / scale;
  fdr_.strong = (a - 2.0 * (model_.B() * xi_)).frobenius() / scale;
}

StationaryLaw stationary_law(const LinearModel& model) { return StationaryLaw(model); }

double entropy_production_rate(const StationaryLaw& law) { return law.epr(); }

double heat_dissipation_rate_stationary(const StationaryLaw& law) {
  const LinearModel& m = law.model();
  const Mat q = m.B().transposed() * m.A_inv() * m.B();
  return 2.0 * (q * law.Xi()).trace() - m.B().trace();
}

Mat two_time_covariance(const StationaryLaw& law, double tau) {
  const Mat& b = law.model().B();
  if (tau == 0.0) return law.Xi();
  if (tau > 0.0) return expm(-tau * b) * law.Xi();
  return law.Xi() * expm(tau * b.transposed());
}

ForceFlux force_flux(const StationaryLaw& law, std::span<const double> x) {
  const LinearModel& model = law.model();
  if (x.size() != model.dim()) throw ArgumentError("force_flux: state has wrong dimension");
  const Mat m = force_defect(model, law.Xi_inv());
  ForceFlux f;
  f.affinity = m * x;
  for (double& v : f.affinity) v = -v;
  f.mechanical_force = (2.0 * model.A_inv_B()) * x;
  for (double& v : f.mechanical_force) v = -v;
  f.flux_per_density = (0.5 * model.A()) * f.affinity;
  const double p = stationary_density(law, x);
  f.flux = f.flux_per_density;
  for (double& v : f.flux) v *= p;
  return f;
}

FdrResiduals fdr_residuals(const StationaryLaw& law) { return law.fdr(); }

double stationary_density(const StationaryLaw& law, std::span<const double> x) {
  if (x.size() != law.model().dim()) {
    throw ArgumentError("stationary_density: state has wrong dimension");
  }
  const double n = static_cast<double>(x.size());
  const double logdet = spd_logdet(law.Xi());
  const double q = quad_form(x, law.Xi_inv(), x);
  return std::exp(-0.5 * (n * std::log(2.0 * std::numbers::pi) + logdet + q));
}

}  // namespace ouirr
