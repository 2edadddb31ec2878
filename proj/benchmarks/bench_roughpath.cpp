#include <benchmark/benchmark.h>

#include "cnstn/noise.hpp"
#include "cnstn/roughpath.hpp"

using namespace cnstn;

namespace {

void BM_GeometricLift(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  noise::DriverPath path = noise::sample_brownian(3, 1.0, steps, 11);
  for (auto _ : state) {
    noise::GeometricLift lift = noise::GeometricLift::from_path(path);
    benchmark::DoNotOptimize(lift.first_level(0, steps));
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_GeometricLift)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_PVariation(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  noise::DriverPath path = noise::sample_brownian(2, 1.0, steps, 13);
  for (auto _ : state) {
    double v = rough::p_variation(path, 2.5);
    benchmark::DoNotOptimize(v);
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_PVariation)->Arg(64)->Arg(128)->Arg(256)->Complexity();

void BM_ChenDefect(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  noise::DriverPath path = noise::sample_brownian(3, 1.0, steps, 17);
  noise::GeometricLift lift = noise::GeometricLift::from_path(path);
  for (auto _ : state) {
    double d = rough::chen_defect(lift);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_ChenDefect)->Arg(256)->Arg(1024);

}  // namespace
