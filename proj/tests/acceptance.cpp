// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria (0 when everything passes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "oracles.hpp"
#include "ou_irrev/cli.hpp"
#include "ou_irrev/error.hpp"
#include "ou_irrev/estimators.hpp"
#include "ou_irrev/sampler.hpp"
#include "ou_irrev/stationary.hpp"
#include "ou_irrev/transient.hpp"

using namespace ouirr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Per-criterion default budget.
constexpr double kDt = 0.01;
constexpr std::size_t kPaths = 200;
constexpr std::size_t kSteps = 10000;  // T = 100
constexpr double kBurnIn = 10.0;
const std::vector<double> kTaus{0.1, 0.5, 1.0};

TrajectoryBatch batch(const LinearModel& m, std::size_t paths, std::size_t steps, std::uint64_t seed,
                      std::optional<Vec> x0 = std::nullopt) {
  BatchSpec spec;
  spec.dt = kDt;
  spec.paths = paths;
  spec.steps = steps;
  spec.seed = seed;
  spec.x0 = std::move(x0);
  return sample_batch(m, spec);
}

Mat chol2(const Mat& s) {
  const double l00 = std::sqrt(s(0, 0));
  const double l10 = s(1, 0) / l00;
  return Mat{{l00, 0.0}, {l10, std::sqrt(s(1, 1) - l10 * l10)}};
}

// ---------------------------------------------------------------- 1

Outcome reversible_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  Outcome o;
  double worst_xi = 0.0, worst_fdr = 0.0, worst_sym = 0.0, worst_epr = 0.0;
  int misclassified = 0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 3);
    const LinearModel m = oracle::random_reversible(n, rng);
    if (classify(m).verdict != Verdict::Reversible) ++misclassified;
    const StationaryLaw law = stationary_law(m);
    const Mat half = LuDecomposition(m.B()).inverse() * m.A() * 0.5;
    worst_xi = std::max(worst_xi, (law.Xi() - half).frobenius());
    worst_fdr = std::max(worst_fdr, law.fdr().strong);
    for (double tau : kTaus) worst_sym = std::max(worst_sym, sym_defect(two_time_covariance(law, tau)));
    worst_epr = std::max(worst_epr, std::abs(law.epr()));
  }
  const double secs = seconds_since(t0);
  o.pass = misclassified == 0 && worst_xi <= 1e-8 && worst_fdr <= 1e-8 && worst_sym <= 1e-8 &&
           worst_epr <= 1e-10 && secs < 5.0;
  o.detail = fmt("misclassified=%d max|Xi-B^-1A/2|=%.2e max strong_fdr=%.2e max sym_defect(R)=%.2e "
                 "max epr=%.2e time=%.2fs",
                 misclassified, worst_xi, worst_fdr, worst_sym, worst_epr, secs);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome rotational_family() {
  Outcome o;
  for (double w : {0.5, 1.0, 2.0}) {
    const auto t0 = Clock::now();
    const LinearModel m = oracle::rotational(w);
    const StationaryLaw law = stationary_law(m);
    const double exact = 2.0 * w * w;
    // quadrature of E[1/2 Pi^T A Pi] with Pi computed from its definition
    const Mat k = LuDecomposition(m.A()).inverse() * m.B();
    const Mat xi_inv = LuDecomposition(law.Xi()).inverse();
    const double quad = oracle::gaussian_expectation_2d(
        [&](const Vec& x) {
          const Vec pi = oracle::comb(-2.0, k * x, 1.0, xi_inv * x);
          return 0.5 * dot(pi, m.A() * pi);
        },
        Vec{0.0, 0.0}, chol2(law.Xi()), 12);
    const HeatRateEstimate h = hdr_estimate(batch(m, kPaths, kSteps, 42), kBurnIn);
    const double rel = std::abs(h.value - law.epr()) / law.epr();
    const double strong_want = w * std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    const double secs = seconds_since(t0);
    const bool ok = std::abs(law.epr() - exact) <= 1e-10 && std::abs(quad - exact) <= 1e-6 && rel < 0.05 &&
                    law.fdr().standard <= 1e-10 && std::abs(law.fdr().strong - strong_want) <= 1e-9 &&
                    secs < 60.0;
    o.pass = o.pass && ok;
    o.detail += fmt("[w=%g epr=%.12g quad_err=%.1e hdr_mc=%.4f (se %.4f, rel %.3f) fdr=%.1e/%.10f %.1fs] ", w,
                    law.epr(), std::abs(quad - exact), h.value, h.se, rel, law.fdr().standard, law.fdr().strong,
                    secs);
  }
  return o;
}

// ---------------------------------------------------------------- 3

Outcome sweeping() {
  Outcome o;
  const LinearModel m = build_model(Mat{{-1.0, 0.0}, {0.0, 1.0}}, Mat::identity(2));
  const bool sweeping = classify(m).verdict == Verdict::Sweeping;
  bool throws = false;
  try {
    stationary_law(m);
  } catch (const NoStationaryLawError&) {
    throws = true;
  }
  const TrajectoryBatch b = batch(m, 1000, 300, 7, Vec{0.0, 0.0});
  o.pass = sweeping && throws;
  o.detail = fmt("verdict=%s no_stationary_law_error=%s ratios:", sweeping ? "Sweeping" : "other",
                 throws ? "yes" : "no");
  for (int t = 1; t <= 3; ++t) {
    double m2 = 0.0;
    for (const auto& p : b.paths) m2 += p.state(static_cast<std::size_t>(100 * t))[0] * p.state(100 * t)[0];
    m2 /= static_cast<double>(b.paths.size());
    const double ratio = m2 / ((std::exp(2.0 * t) - 1.0) / 2.0);
    o.pass = o.pass && ratio >= 0.5 && ratio <= 2.0;
    o.detail += fmt(" t=%d:%.3f", t, ratio);
  }
  return o;
}

// ---------------------------------------------------------------- 4

// max over mean and covariance entries of |ensemble - law| / SE at step k
double ensemble_z(const TrajectoryBatch& b, std::size_t k, const GaussianState& s) {
  const std::size_t n = b.n;
  const double m = static_cast<double>(b.paths.size());
  Vec mean(n, 0.0);
  for (const auto& p : b.paths)
    for (std::size_t i = 0; i < n; ++i) mean[i] += p.state(k)[i] / m;
  Mat cov(n), m4(n);
  for (const auto& p : b.paths) {
    const auto x = p.state(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double v = (x[i] - mean[i]) * (x[j] - mean[j]);
        cov(i, j) += v / (m - 1.0);
        m4(i, j) += v * v / m;
      }
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z = std::max(z, std::abs(mean[i] - s.mean[i]) / std::sqrt(cov(i, i) / m));
    for (std::size_t j = 0; j < n; ++j)
      z = std::max(z, std::abs(cov(i, j) - s.cov(i, j)) / std::sqrt((m4(i, j) - cov(i, j) * cov(i, j)) / m));
  }
  return z;
}

Outcome sampler_fidelity() {
  Outcome o;
  const Vec x0{1.0, -1.0};
  const std::pair<const char*, LinearModel> models[] = {{"reversible", oracle::reversible_2x2()},
                                                        {"irreversible", oracle::rotational(1.0)}};
  for (const auto& [name, m] : models) {
    const TrajectoryBatch b = batch(m, 10000, 500, 3, x0);
    o.detail += fmt("%s:", name);
    for (double t : {0.1, 1.0, 5.0}) {
      const auto k = static_cast<std::size_t>(std::lround(t / kDt));
      const double z = ensemble_z(b, k, propagate(m, x0, t));
      o.pass = o.pass && z <= 4.0;
      o.detail += fmt(" t=%g z=%.2f", t, z);
    }
    o.detail += "  ";
  }
  return o;
}

// ---------------------------------------------------------------- 5

Outcome green_kubo() {
  Outcome o;
  const std::pair<const char*, LinearModel> models[] = {{"reversible", oracle::reversible_2x2()},
                                                        {"irreversible", oracle::rotational(1.0)}};
  for (const auto& [name, m] : models) {
    const TrajectoryBatch stat = batch(m, kPaths, kSteps, 42);
    const TrajectoryBatch cond = batch(m, kPaths, 100, 43, Vec(m.dim(), 1.0));
    const GreenKuboResult r = greenkubo_check(cond, m, kTaus, &stat, kBurnIn);
    o.pass = o.pass && r.max_z <= 4.0 && r.stationary_max_z <= 4.0;
    o.detail += fmt("%s: conditional max z=%.2f stationary R(t,0) max z=%.2f  ", name, r.max_z, r.stationary_max_z);
  }
  return o;
}

// ---------------------------------------------------------------- 6

// Five-point central difference; the three-point rule's h^2 error reaches 1e-5 on the
// faster random models.
double five_point(const std::function<double(double)>& f, double t, double h) {
  return (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h);
}

Outcome entropy_balance() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::vector<LinearModel> corpus{oracle::rotational(0.5), oracle::rotational(1.0), oracle::rotational(2.0),
                                  oracle::reversible_2x2()};
  for (int k = 0; k < 3; ++k) corpus.push_back(oracle::random_reversible(2 + k, rng));
  for (int k = 0; k < 3; ++k) corpus.push_back(oracle::random_irreversible(2 + k, rng));
  double worst_balance = 0.0, worst_psi = 0.0, worst_rise = -INFINITY;
  for (const LinearModel& m : corpus) {
    Vec x0(m.dim(), 0.0);
    x0[0] = 1.5;
    x0.back() -= 0.7;
    const bool reversible = classify(m).verdict == Verdict::Reversible;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      const double h = 1e-4 * std::max(1.0, t);
      const ThermoSnapshot r = instantaneous_rates(m, propagate(m, x0, t));
      const double de = five_point([&](double s) { return entropy(propagate(m, x0, s)); }, t, h);
      worst_balance = std::max(worst_balance, std::abs(de - (r.epr_t - r.hdr_t)));
      if (reversible) {
        const double dpsi = five_point([&](double s) { return free_energy(m, propagate(m, x0, s)); }, t, h);
        worst_psi = std::max(worst_psi, std::abs(dpsi + r.epr_t));
      }
    }
    if (reversible) {
      double prev = INFINITY;
      for (int k = 1; k <= 500; ++k) {
        const double psi = free_energy(m, propagate(m, x0, 0.01 * k));
        worst_rise = std::max(worst_rise, psi - prev);
        prev = psi;
      }
    }
  }
  o.pass = worst_balance <= 1e-5 && worst_psi <= 1e-5 && worst_rise <= 1e-12;
  o.detail = fmt("models=%zu max|de/dt-(epr-hdr)|=%.2e max|dPsi/dt+epr|=%.2e max Psi step change=%.2e",
                 corpus.size(), worst_balance, worst_psi, worst_rise);
  return o;
}

// ---------------------------------------------------------------- 7

Outcome heat_potential() {
  Outcome o;
  std::mt19937_64 rng(707);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int k = 0; k < 6; ++k) {
    const LinearModel m = k == 0 ? oracle::reversible_2x2() : oracle::random_reversible(2 + k % 3, rng);
    const TrajectoryBatch b = batch(m, 50, kSteps, 70 + k);
    for (const auto& p : b.paths) {
      const double u0 = potential(m, p.state(0));
      const double u1 = potential(m, p.state(p.steps()));
      worst = std::max(worst, std::abs(p.heat.back() + u1 - u0) / (1.0 + std::abs(u0)));
      ++checked;
    }
  }
  o.pass = worst <= 1e-9;
  o.detail = fmt("paths=%zu max |W+dU|/(1+|U0|)=%.2e", checked, worst);
  return o;
}

// ---------------------------------------------------------------- 8

Outcome reversibility_calibration() {
  Outcome o;
  std::mt19937_64 rng(808);
  const LinearModel rev3 = oracle::random_reversible(3, rng);
  const LinearModel rev2 = oracle::reversible_2x2();
  const LinearModel rot = oracle::rotational(1.0);
  ReversibilityOptions opts;
  opts.burn_in = kBurnIn;
  int false_irrev = 0, detected = 0;
  double max_null = 0.0, min_alt = INFINITY;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const LinearModel& rev = seed % 2 ? rev2 : rev3;
    const ReversibilityResult a = reversibility_test(batch(rev, kPaths, kSteps, seed), kTaus, opts);
    const ReversibilityResult b = reversibility_test(batch(rot, kPaths, kSteps, seed), kTaus, opts);
    if (!a.reversible) ++false_irrev;
    if (!b.reversible) ++detected;
    max_null = std::max(max_null, a.statistic);
    min_alt = std::min(min_alt, b.statistic);
  }
  o.pass = false_irrev <= 2 && detected >= 48;
  o.detail = fmt("false irreversible %d/50, rotational detected %d/50 (max null stat %.2f, min alt stat %.2f)",
                 false_irrev, detected, max_null, min_alt);
  return o;
}

// ---------------------------------------------------------------- 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("ou_irrev_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "model.json") << R"({"B": [[1, 1], [-1, 1]], "Gamma": [[1, 0], [0, 1]]})";
  const std::size_t paths = 8;
  auto simulate = [&](const std::string& prefix, const char* threads) {
    setenv("OU_IRREV_THREADS", threads, 1);
    const std::string model = (dir / "model.json").string(), out = (dir / prefix).string();
    const char* argv[] = {"ou_irrev", "simulate", model.c_str(), "--paths", "8", "--t-max", "20",
                          "--seed", "2718", "--out", out.c_str()};
    std::ostringstream so, se;
    return cli::run_cli(11, argv, so, se);
  };
  int rc = simulate("run1", "1") | simulate("run2", "1") | simulate("run3", "2") | simulate("run4", "7");
  unsetenv("OU_IRREV_THREADS");
  std::size_t identical = 0, bytes = 0;
  for (std::size_t p = 0; p < paths; ++p) {
    const std::string suffix = "_p" + std::to_string(p) + ".csv";
    const std::string ref = slurp(dir / ("run1" + suffix));
    bytes += ref.size();
    bool same = !ref.empty();
    for (const char* r : {"run2", "run3", "run4"}) same = same && slurp(dir / (r + suffix)) == ref;
    identical += same;
  }
  fs::remove_all(dir);
  o.pass = rc == 0 && identical == paths;
  o.detail = fmt("exit=%d files identical across runs and 1/2/7 workers: %zu/%zu (%zu bytes each run)", rc,
                 identical, paths, bytes);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 reversible-model equivalences", reversible_equivalence},
      {"2 rotational family", rotational_family},
      {"3 sweeping", sweeping},
      {"4 exact-sampler fidelity", sampler_fidelity},
      {"5 Green-Kubo regression", green_kubo},
      {"6 entropy balance", entropy_balance},
      {"7 heat-potential identity", heat_potential},
      {"8 reversibility test calibration", reversibility_calibration},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed;
}
