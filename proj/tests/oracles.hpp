#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the routines it is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "ou_irrev/matrix.hpp"
#include "ou_irrev/model.hpp"

namespace oracle {

using ouirr::Mat;
using ouirr::Vec;
using cplx = std::complex<double>;

// Characteristic polynomial coefficients (monic, highest degree first) by
// Faddeev-LeVerrier: c[0] = 1, p(l) = sum c[k] l^{n-k}.
inline std::vector<double> char_poly(const Mat& a) {
  const std::size_t n = a.dim();
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  Mat m(n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    Mat next = a * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[k - 1];
    m = next;
    c[k] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

inline cplx eval_poly(const std::vector<double>& c, cplx z) {
  cplx v = 0.0;
  for (double ck : c) v = v * z + ck;
  return v;
}

// Durand-Kerner simultaneous root iteration, polished by Newton steps.
inline std::vector<cplx> poly_roots(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  double radius = 0.0;
  for (std::size_t k = 1; k <= n; ++k) radius = std::max(radius, std::abs(c[k]));
  radius = 1.0 + radius;
  std::vector<cplx> z(n);
  const cplx seed(0.4, 0.9);
  for (std::size_t k = 0; k < n; ++k) z[k] = radius * std::pow(seed, static_cast<double>(k));
  for (int it = 0; it < 5000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      const cplx step = eval_poly(c, z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * radius) break;
  }
  // Newton polish on p(z)
  std::vector<double> dc(n);
  for (std::size_t k = 0; k < n; ++k) dc[k] = c[k] * static_cast<double>(n - k);
  for (auto& r : z) {
    for (int it = 0; it < 5; ++it) {
      const cplx d = eval_poly(dc, r);
      if (std::abs(d) == 0.0) break;
      r -= eval_poly(c, r) / d;
    }
  }
  return z;
}

// det(a - l I) by complex Gaussian elimination with partial pivoting.
inline cplx char_det(const Mat& a, cplx l) {
  const std::size_t n = a.dim();
  std::vector<cplx> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j) - (i == j ? l : 0.0);
  cplx det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[p * n + k])) p = i;
    if (std::abs(m[p * n + k]) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      det = -det;
    }
    det *= m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = m[i * n + k] / m[k * n + k];
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return det;
}

// Taylor series with scaling and squaring (norm <= 1/8 after scaling, 30 terms).
inline Mat taylor_expm(const Mat& a) {
  const std::size_t n = a.dim();
  int s = 0;
  double norm = a.frobenius();
  while (norm > 0.125) {
    norm /= 2.0;
    ++s;
  }
  const Mat x = a * std::ldexp(1.0, -s);
  Mat term = Mat::identity(n);
  Mat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x * (1.0 / k);
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

// e^{-B s} for B = [[r, w], [-w, r]]: e^{-r s} [[cos ws, -sin ws], [sin ws, cos ws]].
inline Mat rotational_propagator(double r, double w, double s) {
  const double e = std::exp(-r * s);
  return Mat{{e * std::cos(w * s), -e * std::sin(w * s)}, {e * std::sin(w * s), e * std::cos(w * s)}};
}

// Composite Gauss-Legendre (16 points per panel) of a matrix-valued integrand.
inline Mat integrate_matrix(const std::function<Mat(double)>& f, double a, double b,
                            std::size_t panels, std::size_t n) {
  static const double x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                              0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
  static const double w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                              0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                              0.0622535239386479, 0.0271524594117541};
  Mat acc(n);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (int k = 0; k < 8; ++k) {
      for (double sgn : {-1.0, 1.0}) {
        acc += f(mid + sgn * 0.5 * h * x[k]) * (0.5 * h * w[k]);
      }
    }
  }
  return acc;
}

// Gauss-Hermite nodes/weights for int e^{-y^2} f(y) dy (Newton on the orthonormal recurrence).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermite gauss_hermite(int n) {
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * gh.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * gh.nodes[1];
    } else {
      z = 2.0 * z - gh.nodes[i - 2];
    }
    double pp = 0.0;
    for (int its = 0; its < 100; ++its) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    gh.nodes[i] = z;
    gh.nodes[n - 1 - i] = -z;
    gh.weights[i] = 2.0 / (pp * pp);
    gh.weights[n - 1 - i] = gh.weights[i];
  }
  return gh;
}

// E[f(x)] for x ~ N(mean, L L^T) in 2-D by tensor Gauss-Hermite.
inline double gaussian_expectation_2d(const std::function<double(const Vec&)>& f, const Vec& mean,
                                      const Mat& chol, int order) {
  const GaussHermite gh = gauss_hermite(order);
  double acc = 0.0;
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      const double y0 = std::sqrt(2.0) * gh.nodes[a];
      const double y1 = std::sqrt(2.0) * gh.nodes[b];
      Vec x{mean[0] + chol(0, 0) * y0, mean[1] + chol(1, 0) * y0 + chol(1, 1) * y1};
      acc += gh.weights[a] * gh.weights[b] * f(x);
    }
  }
  return acc / std::numbers::pi;
}

// Matrix with iid N(0,1) entries plus `shift` on the diagonal.
inline Mat random_matrix(std::size_t n, std::mt19937_64& rng, double shift = 0.0) {
  std::normal_distribution<double> nd;
  Mat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = nd(rng) + (i == j ? shift : 0.0);
  return m;
}

inline Mat random_spd(std::size_t n, std::mt19937_64& rng) {
  const Mat g = random_matrix(n, rng);
  Mat s = g * g.transposed() * (1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.5;
  return s.symmetrized();
}

// B = A K with K SPD: A^{-1} B = K is symmetric positive definite.
inline ouirr::LinearModel random_reversible(std::size_t n, std::mt19937_64& rng) {
  const Mat gamma = random_matrix(n, rng, 2.0);
  const Mat a = gamma * gamma.transposed();
  return ouirr::build_model(a * random_spd(n, rng), gamma);
}

// B = shift I + skew + small symmetric part; eigenvalues have real parts near `shift`.
inline ouirr::LinearModel random_irreversible(std::size_t n, std::mt19937_64& rng) {
  Mat skew = random_matrix(n, rng);
  skew = (skew - skew.transposed()) * 0.5;
  Mat b = skew + Mat::identity(n) * 1.5;
  return ouirr::build_model(b, random_matrix(n, rng, 2.0));
}

inline ouirr::LinearModel rotational(double omega) {
  return ouirr::build_model(Mat{{1.0, omega}, {-omega, 1.0}}, Mat::identity(2));
}

inline ouirr::LinearModel reversible_2x2() {
  return ouirr::build_model(Mat{{2.0, 1.0}, {1.0, 2.0}}, Mat::identity(2));
}

// a x + b y
inline Vec comb(double a, const Vec& x, double b, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b * y[i];
  return r;
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).max_abs(); }

}  // namespace oracle
