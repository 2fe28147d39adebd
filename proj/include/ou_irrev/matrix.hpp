#pragma once

// Dense real square-matrix kernels for small systems (n <= 32).
//
// Everything here is a pure function of its arguments. Matrices are stored
// row-major; vectors are plain std::vector<double>.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace ouirr {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat diagonal(std::span<const double> d);
  /// Throws ArgumentError on ragged or non-square input.
  static Mat from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return n_; }
  bool empty() const { return n_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::span<const double> data() const { return a_; }
  std::span<double> data() { return a_; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }

  Mat transposed() const;
  /// 0.5 (M + M^T)
  Mat symmetrized() const;
  double trace() const;
  double frobenius() const;
  /// Maximum absolute column sum.
  double norm1() const;
  double max_abs() const;
  bool all_finite() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator-(Mat a);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// x^T M y
double quad_form(std::span<const double> x, const Mat& m, std::span<const double> y);

/// LU factorization with partial pivoting.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Mat& m);

  bool singular() const { return singular_; }
  double determinant() const;
  /// Throws NumericalError when singular.
  Vec solve(std::span<const double> b) const;
  Mat solve(const Mat& b) const;
  Mat inverse() const;

 private:
  Mat lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;  // sorted by (real, imag)
  double min_real_part = 0.0;
};

/// Eigenvalues by Householder-Hessenberg reduction and Francis double-shift QR.
/// Throws NumericalError if the iteration exceeds 100 n sweeps.
Spectrum eig(const Mat& m);

/// Scaling-and-squaring with the [6/6] Pade approximant; expm(0) == I exactly.
Mat expm(const Mat& m);

/// Solves B X + X B^T = A through the n^2 x n^2 Kronecker system.
/// Throws DegenerateModelError when that system is singular, ArgumentError for n > 32.
Mat solve_lyapunov(const Mat& b, const Mat& a);

/// int_0^t e^{-B s} A e^{-B^T s} ds from one 2n x 2n block exponential.
Mat gram_integral(const Mat& b, const Mat& a, double t);

inline constexpr double kTolSym = 1e-9;
inline constexpr double kTolLyap = 1e-9;
inline constexpr std::size_t kMaxLyapunovDim = 32;

/// ||M - M^T||_F / (1 + ||M||_F)
double sym_defect(const Mat& m);

/// Lower Cholesky factor, or nullopt when a pivot drops to pd_floor.
/// Throws ArgumentError if `s` is not symmetric within kTolSym.
std::optional<Mat> try_cholesky(const Mat& s);
/// As try_cholesky, but throws NumericalError when `s` is not SPD.
Mat chol_spd(const Mat& s);
bool is_spd(const Mat& s);

/// Inverse of an SPD matrix through its Cholesky factor; symmetric on return.
Mat spd_inverse(const Mat& s);
/// log det of an SPD matrix from its Cholesky factor.
double spd_logdet(const Mat& s);

}  // namespace ouirr
