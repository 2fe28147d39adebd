#include "ou_irrev/sampler.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "ou_irrev/error.hpp"

namespace ouirr {

namespace {

void check_step_args(const LinearModel& model, std::span<const double> x0, double dt,
                     std::size_t steps) {
  if (x0.size() != model.dim()) throw ArgumentError("sampler: x0 has wrong dimension");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("sampler: dt must be > 0");
  if (steps < 1) throw ArgumentError("sampler: steps must be >= 1");
}

// Running heat total with Neumaier compensation.
class HeatAccumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Generic one-path loop. `advance(x, next, z)` writes x_{k+1} into `next` from x_k and
// fresh normals z.
template <typename Advance>
Trajectory run_path(const LinearModel& model, std::span<const double> x0, double dt,
                    std::size_t steps, GaussianStream& rng, Advance advance) {
  const std::size_t n = model.dim();
  // dW = (H x_mid) . dx with H = -2 A^{-1} B
  const Mat h = -2.0 * model.A_inv_B();

  Trajectory tr;
  tr.n = n;
  tr.dt = dt;
  tr.seed = rng.id();
  tr.states.resize((steps + 1) * n);
  tr.heat.resize(steps + 1);
  std::copy(x0.begin(), x0.end(), tr.states.begin());
  tr.heat[0] = 0.0;

  Vec z(n), mid(n);
  HeatAccumulator w;
  for (std::size_t k = 0; k < steps; ++k) {
    const double* x = tr.states.data() + k * n;
    double* next = tr.states.data() + (k + 1) * n;
    rng.fill_normal(z);
    advance(x, next, z.data());
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (x[i] + next[i]);
    double dw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = 0.0;
      for (std::size_t j = 0; j < n; ++j) f += h(i, j) * mid[j];
      dw += f * (next[i] - x[i]);
    }
    w.add(dw);
    tr.heat[k + 1] = w.value();
  }
  return tr;
}

Trajectory exact_path(const LinearModel& model, const ExactStepper& st,
                      std::span<const double> x0, std::size_t steps, GaussianStream& rng) {
  const std::size_t n = model.dim();
  const Mat& phi = st.Phi;
  const Mat& l = st.chol;
  return run_path(model, x0, st.dt, steps, rng,
                  [&](const double* x, double* next, const double* z) {
                    for (std::size_t i = 0; i < n; ++i) {
                      double v = 0.0;
                      for (std::size_t j = 0; j < n; ++j) v += phi(i, j) * x[j];
                      for (std::size_t j = 0; j <= i; ++j) v += l(i, j) * z[j];
                      next[i] = v;
                    }
                  });
}

Trajectory euler_path(const LinearModel& model, std::span<const double> x0, double dt,
                      std::size_t steps, GaussianStream& rng) {
  const std::size_t n = model.dim();
  const Mat& b = model.B();
  const Mat& g = model.Gamma();
  const double sq = std::sqrt(dt);
  return run_path(model, x0, dt, steps, rng, [&](const double* x, double* next, const double* z) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = x[i];
      for (std::size_t j = 0; j < n; ++j) v += -b(i, j) * x[j] * dt + g(i, j) * sq * z[j];
      next[i] = v;
    }
  });
}

struct BatchPlan {
  std::optional<StationaryLaw> law;
  std::optional<ExactStepper> stepper;
};

BatchPlan plan_batch(const LinearModel& model, const BatchSpec& spec) {
  if (spec.paths < 1) throw ArgumentError("sample_batch: paths must be >= 1");
  if (!(spec.dt > 0.0)) throw ArgumentError("sample_batch: dt must be > 0");
  if (spec.steps < 1) throw ArgumentError("sample_batch: steps must be >= 1");
  if (spec.x0 && spec.x0->size() != model.dim()) {
    throw ArgumentError("sample_batch: x0 has wrong dimension");
  }
  BatchPlan plan;
  if (!spec.x0) plan.law.emplace(model);
  if (spec.scheme == Scheme::Exact) plan.stepper = make_exact_stepper(model, spec.dt);
  return plan;
}

Trajectory batch_path(const LinearModel& model, const BatchSpec& spec, const BatchPlan& plan,
                      std::size_t index) {
  GaussianStream rng(spec.seed, index);
  Vec x0 = spec.x0 ? *spec.x0 : sample_stationary_start(*plan.law, rng);
  if (spec.scheme == Scheme::Exact) return exact_path(model, *plan.stepper, x0, spec.steps, rng);
  return euler_path(model, x0, spec.dt, spec.steps, rng);
}

TrajectoryBatch empty_batch(const LinearModel& model, const BatchSpec& spec) {
  TrajectoryBatch batch;
  batch.n = model.dim();
  batch.dt = spec.dt;
  batch.seed = spec.seed;
  batch.stationary_start = !spec.x0.has_value();
  batch.paths.resize(spec.paths);
  return batch;
}

}  // namespace

ExactStepper make_exact_stepper(const LinearModel& model, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("exact stepper: dt must be > 0");
  ExactStepper st;
  st.dt = dt;
  st.Phi = expm(-dt * model.B());
  st.Sigma_dt = gram_integral(model.B(), model.A(), dt);
  auto l = try_cholesky(st.Sigma_dt);
  if (!l) throw NumericalError("exact stepper: one-step covariance is not positive definite");
  st.chol = *std::move(l);
  return st;
}

Trajectory sample_path(const LinearModel& model, std::span<const double> x0, double dt,
                       std::size_t steps, GaussianStream& rng) {
  check_step_args(model, x0, dt, steps);
  return exact_path(model, make_exact_stepper(model, dt), x0, steps, rng);
}

Vec sample_stationary_start(const StationaryLaw& law, GaussianStream& rng) {
  const std::size_t n = law.model().dim();
  Vec z(n);
  rng.fill_normal(z);
  const Mat& l = law.Xi_chol();
  Vec x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) x[i] += l(i, j) * z[j];
  return x;
}

Trajectory euler_maruyama_path(const LinearModel& model, std::span<const double> x0, double dt,
                               std::size_t steps, GaussianStream& rng) {
  check_step_args(model, x0, dt, steps);
  return euler_path(model, x0, dt, steps, rng);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OU_IRREV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return omp_get_max_threads();
}

TrajectoryBatch sample_batch(const LinearModel& model, const BatchSpec& spec, int threads) {
  const BatchPlan plan = plan_batch(model, spec);
  TrajectoryBatch batch = empty_batch(model, spec);
  const auto count = static_cast<std::int64_t>(spec.paths);
  const int workers = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t p = 0; p < count; ++p) {
    batch.paths[static_cast<std::size_t>(p)] =
        batch_path(model, spec, plan, static_cast<std::size_t>(p));
  }
  return batch;
}

TrajectoryBatch sample_batch_serial(const LinearModel& model, const BatchSpec& spec) {
  const BatchPlan plan = plan_batch(model, spec);
  TrajectoryBatch batch = empty_batch(model, spec);
  for (std::size_t p = 0; p < spec.paths; ++p) batch.paths[p] = batch_path(model, spec, plan, p);
  return batch;
}

}  // namespace ouirr
