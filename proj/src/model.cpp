#include "ou_irrev/model.hpp"

#include <cmath>
#include <string>

#include "ou_irrev/error.hpp"

namespace ouirr {

LinearModel::LinearModel(Mat b, Mat gamma) : b_(std::move(b)), gamma_(std::move(gamma)) {
  if (b_.empty()) throw ArgumentError("model: B must be non-empty");
  if (b_.dim() != gamma_.dim()) {
    throw ArgumentError("model: B is " + std::to_string(b_.dim()) + "x" +
                        std::to_string(b_.dim()) + " but Gamma is " +
                        std::to_string(gamma_.dim()) + "x" + std::to_string(gamma_.dim()));
  }
  if (!b_.all_finite() || !gamma_.all_finite()) {
    throw ValidationError("model: B and Gamma must have finite entries");
  }
  const std::size_t n = b_.dim();
  const double det = LuDecomposition(gamma_).determinant();
  const double scale = std::pow(gamma_.frobenius(), static_cast<double>(n));
  if (!(std::abs(det) > 1e-12 * scale)) {
    throw ValidationError("model: Gamma is singular (|det| = " + std::to_string(std::abs(det)) +
                          ")");
  }
  a_ = (gamma_ * gamma_.transposed()).symmetrized();
  if (!is_spd(a_)) throw ValidationError("model: A = Gamma Gamma^T is not positive definite");
  a_inv_ = spd_inverse(a_);
  a_inv_b_ = LuDecomposition(a_).solve(b_);
}

LinearModel build_model(Mat b, Mat gamma) { return LinearModel(std::move(b), std::move(gamma)); }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Sweeping:
      return "Sweeping";
    case Verdict::Reversible:
      return "Reversible";
    case Verdict::Irreversible:
      return "Irreversible";
  }
  return "?";
}

Classification classify(const LinearModel& model) {
  Classification c;
  c.spectrum_B = eig(model.B());
  c.symmetry_defect_AinvB = sym_defect(model.A_inv_B());
  const double min_re = c.spectrum_B.min_real_part;
  if (min_re <= kSpectralTol) {
    c.verdict = Verdict::Sweeping;
    c.marginal = std::abs(min_re) <= kSpectralTol;
    return c;
  }
  const bool symmetric = c.symmetry_defect_AinvB <= kTolSym;
  c.verdict = symmetric && is_spd(model.A_inv_B().symmetrized()) ? Verdict::Reversible
                                                                 : Verdict::Irreversible;
  return c;
}

Vec drift(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) throw ArgumentError("drift: state has wrong dimension");
  Vec y = model.B() * x;
  for (double& v : y) v = -v;
  return y;
}

}  // namespace ouirr
