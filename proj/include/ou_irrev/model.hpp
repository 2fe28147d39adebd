#pragma once

// The linear system dx/dt = -B x + Gamma xi(t) and its classification into
// sweeping, reversible and irreversible regimes.

#include <span>
#include <string_view>

#include "ou_irrev/matrix.hpp"

namespace ouirr {

/// Eigenvalues with real part at or below this are treated as non-stable.
inline constexpr double kSpectralTol = 1e-9;

class LinearModel {
 public:
  /// Throws ArgumentError on shape mismatch, ValidationError on singular Gamma or
  /// non-finite entries.
  LinearModel(Mat b, Mat gamma);

  std::size_t dim() const { return b_.dim(); }
  const Mat& B() const { return b_; }
  const Mat& Gamma() const { return gamma_; }
  /// Gamma Gamma^T, exactly symmetric.
  const Mat& A() const { return a_; }
  const Mat& A_inv() const { return a_inv_; }
  /// A^{-1} B; symmetric iff the stationary law (if any) is reversible.
  const Mat& A_inv_B() const { return a_inv_b_; }

 private:
  Mat b_;
  Mat gamma_;
  Mat a_;
  Mat a_inv_;
  Mat a_inv_b_;
};

LinearModel build_model(Mat b, Mat gamma);

enum class Verdict { Sweeping, Reversible, Irreversible };

std::string_view to_string(Verdict v);

struct Classification {
  Verdict verdict = Verdict::Sweeping;
  Spectrum spectrum_B;
  double symmetry_defect_AinvB = 0.0;
  /// Some eigenvalue of B lies within kSpectralTol of the imaginary axis.
  bool marginal = false;
};

Classification classify(const LinearModel& model);

/// b(x) = -B x
Vec drift(const LinearModel& model, std::span<const double> x);

}  // namespace ouirr
