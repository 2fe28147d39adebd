#include "ou_irrev/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ou_irrev/error.hpp"

namespace ouirr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_same_dim(const Mat& a, const Mat& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw ArgumentError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                        " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Mat

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
  a_.reserve(n_ * n_);
  for (const auto& r : rows) {
    if (r.size() != n_) throw ArgumentError("Mat: rows must form a square matrix");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  Mat m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw ArgumentError("matrix must have at least one row");
  Mat m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ArgumentError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                          " entries, expected " + std::to_string(n));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.a_.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return m;
}

Mat Mat::transposed() const {
  Mat t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat Mat::symmetrized() const {
  Mat s(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
  return s;
}

double Mat::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double Mat::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Mat::norm1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < n_; ++i) c += std::abs((*this)(i, j));
    best = std::max(best, c);
  }
  return best;
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool Mat::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

Mat& Mat::operator+=(const Mat& o) {
  require_same_dim(*this, o, "Mat::operator+=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require_same_dim(*this, o, "Mat::operator-=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator-(Mat a) { return a *= -1.0; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  require_same_dim(a, b, "Mat::operator*");
  const std::size_t n = a.dim();
  Mat c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vec operator*(const Mat& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw ArgumentError("matrix-vector product: dimension mismatch");
  Vec y(a.dim(), 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double quad_form(std::span<const double> x, const Mat& m, std::span<const double> y) {
  return dot(x, m * y);
}

// ---------------------------------------------------------------------------
// LU

LuDecomposition::LuDecomposition(const Mat& m) : lu_(m), perm_(m.dim()) {
  const std::size_t n = m.dim();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double floor = static_cast<double>(n) * kEps * m.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best <= floor) {
      singular_ = true;
      continue;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const double pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

double LuDecomposition::determinant() const {
  if (singular_) return 0.0;
  double d = sign_;
  for (std::size_t i = 0; i < lu_.dim(); ++i) d *= lu_(i, i);
  return d;
}

Vec LuDecomposition::solve(std::span<const double> b) const {
  if (singular_) throw NumericalError("LU solve: matrix is singular");
  const std::size_t n = lu_.dim();
  if (b.size() != n) throw ArgumentError("LU solve: dimension mismatch");
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Mat LuDecomposition::solve(const Mat& b) const {
  const std::size_t n = lu_.dim();
  Mat x(n);
  Vec col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    const Vec sol = solve(col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  return x;
}

Mat LuDecomposition::inverse() const { return solve(Mat::identity(lu_.dim())); }

// ---------------------------------------------------------------------------
// Eigenvalues

namespace {

// Permutation-free diagonal balancing (powers of the radix so it is exact).
void balance(Mat& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.dim();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      }
      if (c != 0.0 && r != 0.0) {
        double g = r / radix;
        double f = 1.0;
        const double s = c + r;
        while (c < g) {
          f *= radix;
          c *= sqrdx;
        }
        g = r * radix;
        while (c > g) {
          f /= radix;
          c /= sqrdx;
        }
        if ((c + r) / f < 0.95 * s) {
          done = false;
          g = 1.0 / f;
          for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
          for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
        }
      }
    }
  }
}

// Householder reduction to upper Hessenberg form, in place.
void to_hessenberg(Mat& a) {
  const std::size_t n = a.dim();
  if (n < 3) return;
  Vec v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0.0) alpha = -alpha;
    std::fill(v.begin(), v.end(), 0.0);
    v[k + 1] = a(k + 1, k) - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    // A <- H A
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A H
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr lineage).
std::vector<std::complex<double>> hessenberg_qr(Mat& a) {
  const int n = static_cast<int>(a.dim());
  std::vector<std::complex<double>> w(a.dim());
  const int max_sweeps = 100 * n;
  int total_sweeps = 0;

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        w[nn--] = x + t;
      } else {
        double y = a(nn - 1, nn - 1);
        double ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + ww;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[nn - 1] = w[nn] = x + z;
            if (z != 0.0) w[nn] = x - ww / z;
          } else {
            w[nn] = std::complex<double>(x + p, -z);
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (++total_sweeps > max_sweeps) {
            throw NumericalError("eig: QR iteration did not converge in " +
                                 std::to_string(max_sweeps) + " sweeps");
          }
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

Spectrum eig(const Mat& m) {
  if (m.empty()) throw ArgumentError("eig: empty matrix");
  if (!m.all_finite()) throw ArgumentError("eig: matrix has non-finite entries");
  Mat h = m;
  balance(h);
  to_hessenberg(h);
  Spectrum s;
  s.eigenvalues = hessenberg_qr(h);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  s.min_real_part = s.eigenvalues.front().real();
  return s;
}

// ---------------------------------------------------------------------------
// Matrix exponential

Mat expm(const Mat& m) {
  if (!m.all_finite()) throw ArgumentError("expm: matrix has non-finite entries");
  const std::size_t n = m.dim();
  const double norm = m.norm1();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  if (squarings > 1000) throw NumericalError("expm: matrix norm too large");

  Mat x = m * std::ldexp(1.0, -squarings);

  // [6/6] Pade: c_k = (2q-k)! q! / ((2q)! k! (q-k)!), q = 6
  constexpr double c[7] = {1.0,          1.0 / 2.0,     5.0 / 44.0,       1.0 / 66.0,
                           1.0 / 792.0,  1.0 / 15840.0, 1.0 / 665280.0};
  const Mat eye = Mat::identity(n);
  const Mat x2 = x * x;
  const Mat x4 = x2 * x2;
  const Mat x6 = x4 * x2;
  const Mat even = c[0] * eye + c[2] * x2 + c[4] * x4 + c[6] * x6;
  const Mat odd = x * (c[1] * eye + c[3] * x2 + c[5] * x4);
  const LuDecomposition denom(even - odd);
  if (denom.singular()) throw NumericalError("expm: Pade denominator is singular");
  Mat r = denom.solve(even + odd);
  for (int k = 0; k < squarings; ++k) r = r * r;
  if (!r.all_finite()) throw NumericalError("expm: result overflowed");
  return r;
}

// ---------------------------------------------------------------------------
// Lyapunov / Gram integral

Mat solve_lyapunov(const Mat& b, const Mat& a) {
  require_same_dim(b, a, "solve_lyapunov");
  const std::size_t n = b.dim();
  if (n == 0) throw ArgumentError("solve_lyapunov: empty matrix");
  if (n > kMaxLyapunovDim) {
    throw ArgumentError("solve_lyapunov: dimension " + std::to_string(n) + " exceeds " +
                        std::to_string(kMaxLyapunovDim));
  }
  // Row-major vec: vec(B X) = (B (x) I) vec(X), vec(X B^T) = (I (x) B) vec(X).
  const std::size_t nn = n * n;
  Mat k(nn);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t m = 0; m < n; ++m) {
        k(row, m * n + j) += b(i, m);
        k(row, i * n + m) += b(j, m);
      }
    }
  }
  const LuDecomposition lu(k);
  if (lu.singular()) {
    throw DegenerateModelError(
        "solve_lyapunov: Kronecker system is singular (eigenvalues of B sum to zero)");
  }
  const Vec x = lu.solve(a.data());
  Mat xi(n);
  std::copy(x.begin(), x.end(), xi.data().begin());
  return xi.symmetrized();
}

namespace {

// Van Loan block exponential, accurate while ||B t|| is small.
Mat gram_short(const Mat& b, const Mat& a, double t) {
  const std::size_t n = b.dim();
  // exp([[-B, A], [0, B^T]] t) = [[e^{-Bt}, F], [0, e^{B^T t}]] with F e^{-B^T t} = G(t).
  Mat block(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      block(i, j) = -b(i, j) * t;
      block(i, n + j) = a(i, j) * t;
      block(n + i, n + j) = b(j, i) * t;
    }
  }
  const Mat e = expm(block);
  Mat g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += e(i, n + k) * e(j, k);
      g(i, j) = s;
    }
  }
  return g.symmetrized();
}

}  // namespace

Mat gram_integral(const Mat& b, const Mat& a, double t) {
  require_same_dim(b, a, "gram_integral");
  if (!(t >= 0.0)) throw ArgumentError("gram_integral: t must be >= 0");
  if (t == 0.0) return Mat(b.dim());
  // The block exponential grows like e^{B^T t}; evaluate on a short step and
  // double with G(2s) = e^{-Bs} G(s) e^{-B^T s} + G(s).
  int s = 0;
  const double norm = b.norm1() * t;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double h = std::ldexp(t, -s);
  Mat g = gram_short(b, a, h);
  Mat e = expm(b * (-h));
  for (int k = 0; k < s; ++k) {
    g = (e * g * e.transposed() + g).symmetrized();
    e = e * e;
  }
  if (!g.all_finite()) throw NumericalError("gram_integral: overflow");
  return g;
}

// ---------------------------------------------------------------------------
// Symmetry / SPD

double sym_defect(const Mat& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const double v = m(i, j) - m(j, i);
      d += v * v;
    }
  }
  return std::sqrt(d) / (1.0 + m.frobenius());
}

std::optional<Mat> try_cholesky(const Mat& s) {
  if (sym_defect(s) > kTolSym) throw ArgumentError("cholesky: matrix is not symmetric");
  const std::size_t n = s.dim();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(s(i, i)));
  const double pd_floor = 1e-12 * (1.0 + max_diag);

  Mat l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pd_floor)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = 0.5 * (s(i, j) + s(j, i));
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

Mat chol_spd(const Mat& s) {
  auto l = try_cholesky(s);
  if (!l) throw NumericalError("cholesky: matrix is not positive definite");
  return *std::move(l);
}

bool is_spd(const Mat& s) { return try_cholesky(s).has_value(); }

Mat spd_inverse(const Mat& s) {
  const Mat l = chol_spd(s);
  const std::size_t n = s.dim();
  // inv(L) by forward substitution, then inv(S) = inv(L)^T inv(L).
  Mat li(n);
  for (std::size_t j = 0; j < n; ++j) {
    li(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = 0.0;
      for (std::size_t k = j; k < i; ++k) v -= l(i, k) * li(k, j);
      li(i, j) = v / l(i, i);
    }
  }
  return (li.transposed() * li).symmetrized();
}

double spd_logdet(const Mat& s) {
  const Mat l = chol_spd(s);
  double ld = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) ld += 2.0 * std::log(l(i, i));
  return ld;
}

}  // namespace ouirr
