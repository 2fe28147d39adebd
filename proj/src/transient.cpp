#include "ou_irrev/transient.hpp"

#include <cmath>
#include <numbers>

#include "ou_irrev/error.hpp"

namespace ouirr {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require_dim(const LinearModel& model, std::span<const double> x, const char* what) {
  if (x.size() != model.dim()) throw ArgumentError(std::string(what) + ": wrong dimension");
}

Mat spd_or_throw_inverse(const Mat& cov) {
  if (!is_spd(cov)) throw UndefinedEntropyError("covariance is singular");
  return spd_inverse(cov);
}

}  // namespace

GaussianState propagate(const LinearModel& model, std::span<const double> x0, double t) {
  require_dim(model, x0, "propagate");
  if (!(t >= 0.0)) throw ArgumentError("propagate: t must be >= 0");
  GaussianState s;
  s.t = t;
  if (t == 0.0) {
    s.mean.assign(x0.begin(), x0.end());
    s.cov = Mat(model.dim());
    return s;
  }
  s.mean = expm(-t * model.B()) * x0;
  s.cov = gram_integral(model.B(), model.A(), t);
  return s;
}

double transition_density(const LinearModel& model, std::span<const double> x, double t,
                          std::span<const double> x0) {
  require_dim(model, x, "transition_density");
  if (!(t > 0.0)) throw ArgumentError("transition_density: t must be > 0");
  const GaussianState s = propagate(model, x0, t);
  Vec d(x.begin(), x.end());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s.mean[i];
  const double q = quad_form(d, spd_inverse(s.cov), d);
  const double n = static_cast<double>(d.size());
  return std::exp(-0.5 * (n * kLog2Pi + spd_logdet(s.cov) + q));
}

double entropy(const GaussianState& state) {
  if (!is_spd(state.cov)) {
    throw UndefinedEntropyError("entropy is undefined for a singular covariance (t = " +
                                std::to_string(state.t) + ")");
  }
  const double n = static_cast<double>(state.cov.dim());
  return 0.5 * n * (1.0 + kLog2Pi) + 0.5 * spd_logdet(state.cov);
}

double potential(const LinearModel& model, std::span<const double> x) {
  if (classify(model).verdict != Verdict::Reversible) {
    throw PotentialUndefinedError("potential exists only for reversible models");
  }
  require_dim(model, x, "potential");
  return quad_form(x, model.A_inv_B().symmetrized(), x);
}

double free_energy(const LinearModel& model, const GaussianState& state) {
  if (classify(model).verdict != Verdict::Reversible) {
    throw PotentialUndefinedError("free energy requires a reversible model");
  }
  const Mat s = model.A_inv_B().symmetrized();
  const double mean_u = (s * state.cov).trace() + quad_form(state.mean, s, state.mean);
  return mean_u - entropy(state);
}

ThermoSnapshot instantaneous_rates(const LinearModel& model, const GaussianState& state) {
  ThermoSnapshot snap;
  snap.t = state.t;
  snap.entropy = entropy(state);
  const Mat cov_inv = spd_or_throw_inverse(state.cov);
  const Mat& a = model.A();
  const Mat& b = model.B();
  const Mat k = 2.0 * model.A_inv_B();

  // grad log P - 2 A^{-1} b = M y + K mu with y = x - mu, M = K - cov^{-1}
  const Mat m = k - cov_inv;
  const Vec k_mu = k * state.mean;
  snap.epr_t = 0.5 * ((m.transposed() * a * m * state.cov).trace() + quad_form(k_mu, a, k_mu));

  const Mat q = b.transposed() * model.A_inv() * b;
  snap.hdr_t = 2.0 * ((q * state.cov).trace() + quad_form(state.mean, q, state.mean)) - b.trace();
  snap.entropy_rate = snap.epr_t - snap.hdr_t;

  if (classify(model).verdict == Verdict::Reversible) snap.free_energy = free_energy(model, state);
  return snap;
}

double relative_entropy(const StationaryLaw& law, const GaussianState& state) {
  const double n = static_cast<double>(state.cov.dim());
  const double tr = (law.Xi_inv() * state.cov).trace();
  const double mq = quad_form(state.mean, law.Xi_inv(), state.mean);
  return 0.5 * (tr + mq - n + spd_logdet(law.Xi()) - spd_logdet(state.cov));
}

}  // namespace ouirr
