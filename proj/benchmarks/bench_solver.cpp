#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cnstn/noise.hpp"
#include "cnstn/solver.hpp"
#include "cnstn/spectral.hpp"

using namespace cnstn;

namespace {

ScalarField density_field(const TorusGrid& g) {
  std::vector<double> ax = g.axis_points();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    double x = ax[static_cast<std::size_t>(idx[0])];
    double y = ax[static_cast<std::size_t>(idx[1])];
    v[i] = 1.0 + 0.1 * std::cos(x) + 0.05 * std::sin(y);
  }
  return ScalarField::from_values(g, std::move(v));
}

VectorField shear_field(const TorusGrid& g) {
  std::vector<double> ax = g.axis_points();
  VectorField u(g);
  std::vector<double> v0(g.size()), v1(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    double x = ax[static_cast<std::size_t>(idx[0])];
    double y = ax[static_cast<std::size_t>(idx[1])];
    v0[i] = 0.1 * std::sin(y);
    v1[i] = 0.1 * std::cos(x);
  }
  u[0] = ScalarField::from_values(g, std::move(v0));
  u[1] = ScalarField::from_values(g, std::move(v1));
  return u;
}

struct Setup {
  TorusGrid grid;
  ScalarField rho0;
  VectorField u0;
  solver::SchemeParams params;
  noise::QField q;
  noise::DriverPath driver;

  Setup(int m, int n, int steps)
      : grid(2, m, n),
        rho0(density_field(grid)),
        u0(grid),
        q(noise::QField::constant(grid, {{0.2, 0.1, 0.0}, {-0.1, 0.15, 0.0}})) {
    params.m = m;
    params.gamma = 2.0;
    params.beta = 5.0;
    params.delta = 0.0;
    params.epsilon = 1e-3;
    params.dt = 1e-3;
    params.T = params.dt * static_cast<double>(steps);
    driver = noise::sample_brownian(2, params.T, steps, 7);
  }
};

void BM_ShortRun(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = n / 4;
  Setup s(m, n, 4);
  solver::RunOptions ro;
  ro.stride = 4;
  for (auto _ : state) {
    solver::Trajectory traj = solver::run(s.rho0, s.u0, s.params, s.q, s.driver, ro);
    benchmark::DoNotOptimize(traj.steps.size());
  }
  state.counters["steps"] = 4;
}
BENCHMARK(BM_ShortRun)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_VelocitySolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = n / 4;
  Setup s(m, n, 1);
  ScalarField rho = solver::prepare_density(s.rho0, m, 0.05);
  VectorField u = solver::prepare_velocity(shear_field(s.grid), m);
  VectorField q_m = spectral::project_modes(spectral::multiply(rho, u), m);
  for (auto _ : state) {
    VectorField v = solver::solve_velocity(rho, q_m, m);
    benchmark::DoNotOptimize(v[0].coeffs().data());
  }
}
BENCHMARK(BM_VelocitySolve)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace
