#pragma once

// Path generation for dx/dt = -B x + Gamma xi(t) with on-path accumulation of
// the Stratonovich heat functional dW = 2 A^{-1} b(X) o dX.
//
// The exact sampler draws each step from the one-step transition law
// N(Phi x, Sigma_dt); the Euler-Maruyama integrator is kept as a biased
// reference. Heat increments use the chord midpoint:
//   dW_k = 2 (A^{-1} b(x_mid)) . (x_{k+1} - x_k),  x_mid = (x_k + x_{k+1}) / 2.
//
// sample_batch() fans paths out over OpenMP threads; sample_batch_serial() is
// the single-threaded reference. Both produce bit-identical batches because
// path k always draws from stream (seed, k).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ou_irrev/matrix.hpp"
#include "ou_irrev/model.hpp"
#include "ou_irrev/rng.hpp"
#include "ou_irrev/stationary.hpp"

namespace ouirr {

struct ExactStepper {
  double dt = 0.0;
  Mat Phi;       // e^{-B dt}
  Mat Sigma_dt;  // gram_integral(B, A, dt)
  Mat chol;      // lower factor of Sigma_dt
};

ExactStepper make_exact_stepper(const LinearModel& model, double dt);

struct Trajectory {
  std::size_t n = 0;
  double dt = 0.0;
  std::vector<double> states;  // (steps + 1) x n, row-major
  std::vector<double> heat;    // cumulative W, heat[0] = 0
  StreamId seed;

  std::size_t size() const { return heat.size(); }
  std::size_t steps() const { return heat.empty() ? 0 : heat.size() - 1; }
  std::span<const double> state(std::size_t k) const { return {states.data() + k * n, n}; }
  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
  double duration() const { return time(steps()); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

Trajectory sample_path(const LinearModel& model, std::span<const double> x0, double dt,
                       std::size_t steps, GaussianStream& rng);

/// Draw from N(0, Xi).
Vec sample_stationary_start(const StationaryLaw& law, GaussianStream& rng);

Trajectory euler_maruyama_path(const LinearModel& model, std::span<const double> x0, double dt,
                               std::size_t steps, GaussianStream& rng);

enum class Scheme { Exact, EulerMaruyama };

struct BatchSpec {
  double dt = 0.01;
  std::size_t steps = 10000;
  std::size_t paths = 200;
  std::uint64_t seed = 42;
  /// Fixed start for every path; nullopt draws each start from the stationary law.
  std::optional<Vec> x0;
  Scheme scheme = Scheme::Exact;
};

struct TrajectoryBatch {
  std::size_t n = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  bool stationary_start = false;
  std::vector<Trajectory> paths;

  std::size_t steps() const { return paths.empty() ? 0 : paths.front().steps(); }
  double duration() const { return paths.empty() ? 0.0 : paths.front().duration(); }
};

/// Worker count: `requested` if positive, else OU_IRREV_THREADS if set and positive,
/// else the OpenMP default.
int resolve_threads(int requested = 0);

TrajectoryBatch sample_batch(const LinearModel& model, const BatchSpec& spec, int threads = 0);
TrajectoryBatch sample_batch_serial(const LinearModel& model, const BatchSpec& spec);

}  // namespace ouirr
