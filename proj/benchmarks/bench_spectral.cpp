#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cnstn/field.hpp"
#include "cnstn/grid.hpp"
#include "cnstn/spectral.hpp"

using namespace cnstn;

namespace {

ScalarField wave_field(const TorusGrid& g, double a, double b) {
  std::vector<double> ax = g.axis_points();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    double x = ax[static_cast<std::size_t>(idx[0])];
    double y = g.dim > 1 ? ax[static_cast<std::size_t>(idx[1])] : 0.0;
    v[i] = 1.0 + a * std::cos(x) + b * std::sin(x + y);
  }
  return ScalarField::from_values(g, std::move(v));
}

void BM_ForwardInverseFFT(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TorusGrid g(2, n / 4, n);
  ScalarField f = wave_field(g, 0.3, 0.1);
  f.coeffs();
  for (auto _ : state) {
    ScalarField h = f;
    h.values_mut()[0] += 0.0;  // invalidate coefficients
    benchmark::DoNotOptimize(h.coeffs().data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ForwardInverseFFT)->Arg(32)->Arg(64)->Arg(128);

void BM_DealiasedProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TorusGrid g(2, n / 4, n);
  ScalarField f = wave_field(g, 0.3, 0.1);
  ScalarField h = wave_field(g, 0.1, 0.4);
  f.coeffs();
  h.coeffs();
  for (auto _ : state) {
    ScalarField p = spectral::multiply(f, h);
    benchmark::DoNotOptimize(p.coeffs().data());
  }
}
BENCHMARK(BM_DealiasedProduct)->Arg(32)->Arg(64)->Arg(128);

void BM_GradientDivergence(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TorusGrid g(2, n / 4, n);
  ScalarField f = wave_field(g, 0.3, 0.1);
  f.coeffs();
  for (auto _ : state) {
    VectorField grad = spectral::gradient(f);
    ScalarField back = spectral::divergence(grad);
    benchmark::DoNotOptimize(back.coeffs().data());
  }
}
BENCHMARK(BM_GradientDivergence)->Arg(32)->Arg(64)->Arg(128);

void BM_PaddedQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TorusGrid g(2, n / 4, n);
  ScalarField f = wave_field(g, 0.3, 0.1);
  ScalarField h = wave_field(g, 0.1, 0.4);
  f.coeffs();
  h.coeffs();
  for (auto _ : state) {
    double v = spectral::integrate_pointwise_padded(
        f, h, [](double a, double b) { return a * a * b; }, 3);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_PaddedQuadrature)->Arg(32)->Arg(64);

}  // namespace
