// Serial reference vs OpenMP batch path generation.
//
//   ./build/bench/bench_sampler --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include "ou_irrev/estimators.hpp"
#include "ou_irrev/model.hpp"
#include "ou_irrev/sampler.hpp"

namespace {

using ouirr::BatchSpec;
using ouirr::LinearModel;
using ouirr::Mat;

LinearModel rotational(double omega) {
  return ouirr::build_model(Mat{{1.0, omega}, {-omega, 1.0}}, Mat::identity(2));
}

BatchSpec spec_for(const benchmark::State& state) {
  BatchSpec spec;
  spec.dt = 0.01;
  spec.steps = 2000;
  spec.paths = static_cast<std::size_t>(state.range(0));
  spec.seed = 7;
  return spec;
}

void BM_BatchSerial(benchmark::State& state) {
  const LinearModel model = rotational(1.0);
  const BatchSpec spec = spec_for(state);
  for (auto _ : state) {
    auto batch = ouirr::sample_batch_serial(model, spec);
    benchmark::DoNotOptimize(batch.paths.back().heat.back());
  }
  state.counters["steps/s"] = benchmark::Counter(
      static_cast<double>(spec.paths * spec.steps), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_BatchOpenMP(benchmark::State& state) {
  const LinearModel model = rotational(1.0);
  const BatchSpec spec = spec_for(state);
  for (auto _ : state) {
    auto batch = ouirr::sample_batch(model, spec);
    benchmark::DoNotOptimize(batch.paths.back().heat.back());
  }
  state.counters["steps/s"] = benchmark::Counter(
      static_cast<double>(spec.paths * spec.steps), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_TwoTimeEstimate(benchmark::State& state) {
  const LinearModel model = rotational(1.0);
  const auto batch = ouirr::sample_batch(model, spec_for(state));
  for (auto _ : state) {
    auto est = ouirr::two_time_estimate(batch, 0.5);
    benchmark::DoNotOptimize(est.r_hat(0, 1));
  }
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOpenMP)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoTimeEstimate)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
