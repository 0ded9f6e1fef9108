#include <benchmark/benchmark.h>

#include <numbers>

#include "qstab/simulator.hpp"

namespace {

using namespace qstab;

constexpr double kPi = std::numbers::pi;

LinearSystem rotation_system() {
  Matrix B(2, 1);
  B << 1.0, 0.0;
  return LinearSystem(rotation2d(kPi / 3.0), B);
}

Vector start_state() {
  Vector x0(2);
  x0 << 10.0, 10.0;
  return x0;
}

void BM_Quantize(benchmark::State& state) {
  const RadialQuantizer q = design_bins(2, 7.0, kPi / state.range(0));
  Vector z(2);
  z << 9.0, 4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantize(q, z));
  }
}
BENCHMARK(BM_Quantize)->Arg(8)->Arg(64);

void BM_NoiseSample(benchmark::State& state) {
  const NoiseModel model = NoiseModel::gaussian_isotropic(static_cast<int>(state.range(0)), 1.0);
  SeededStream stream{42, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample(model, stream));
  }
}
BENCHMARK(BM_NoiseSample)->Arg(2)->Arg(8);

void BM_PlanBlock(benchmark::State& state) {
  const LinearSystem sys = rotation_system();
  const ReachabilityInfo reach = compute_reachability(sys);
  const RadialQuantizer q = design_bins(2, 7.0, kPi / 8.0);
  const Matrix A2 = matrix_power(sys.A, reach.kappa);
  Vector x(2);
  x << 9.0, 4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_block(PolicyKind::Quantized, reach, A2, q, x));
  }
}
BENCHMARK(BM_PlanBlock);

void BM_ComputeReachability(benchmark::State& state) {
  const LinearSystem sys = rotation_system();
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_reachability(sys));
  }
}
BENCHMARK(BM_ComputeReachability);

void BM_Rollout(benchmark::State& state) {
  const LinearSystem sys = rotation_system();
  const ReachabilityInfo reach = compute_reachability(sys);
  const RadialQuantizer q = design_bins(2, 7.0, kPi / 8.0);
  const NoiseModel noise = NoiseModel::gaussian_isotropic(2, 1.0);
  const Vector x0 = start_state();
  const int horizon = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rollout(sys, reach, q, PolicyKind::Quantized, noise, x0, horizon, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_Rollout)->Arg(200)->Arg(2000);

void BM_Ensemble(benchmark::State& state) {
  const LinearSystem sys = rotation_system();
  const ReachabilityInfo reach = compute_reachability(sys);
  const RadialQuantizer q = design_bins(2, 7.0, kPi / 8.0);
  const NoiseModel noise = NoiseModel::gaussian_isotropic(2, 1.0);
  const RolloutSpec spec{sys,   reach,          q,  PolicyKind::Quantized,
                         noise, start_state(), 200, 42,
                         static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ensemble(spec, 1000));
  }
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_DesignBins3d(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(design_bins(3, 7.0, kPi / 8.0));
  }
}
BENCHMARK(BM_DesignBins3d)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
