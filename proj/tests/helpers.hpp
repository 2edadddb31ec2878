#pragma once

// Shared fixtures for the test suites: pointwise field construction, random
// band-limited fields, comparison helpers, and scratch directories for suites
// that exercise file artifacts.

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cnstn/field.hpp"
#include "cnstn/grid.hpp"
#include "cnstn/spectral.hpp"

namespace testutil {

using cnstn::ScalarField;
using cnstn::TorusGrid;
using cnstn::VectorField;

/// Sample f(x) on the collocation grid; f receives std::array<double,3>
/// (unused axes read 0).
template <typename F>
ScalarField sample(const TorusGrid& g, F&& f) {
  const auto xs = g.axis_points();
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto idx = g.unravel(j);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int ax = 0; ax < g.dim; ++ax) x[static_cast<std::size_t>(ax)] = xs[static_cast<std::size_t>(idx[static_cast<std::size_t>(ax)])];
    v[j] = f(x);
  }
  return ScalarField::from_values(g, std::move(v));
}

template <typename FX, typename FY>
VectorField sample_vec(const TorusGrid& g, FX&& fx, FY&& fy) {
  VectorField u(g);
  u[0] = sample(g, fx);
  u[1] = sample(g, fy);
  return u;
}

/// Random real field band-limited to |k|_inf <= cutoff: collocation white
/// noise pushed through the band projection (guarantees realness and support).
inline ScalarField random_field(const TorusGrid& g, int cutoff, std::mt19937_64& rng,
                                double amp = 1.0) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = amp * n01(rng);
  return cnstn::spectral::project_modes(ScalarField::from_values(g, std::move(v)), cutoff);
}

inline VectorField random_vector_field(const TorusGrid& g, int cutoff, std::mt19937_64& rng,
                                       double amp = 1.0) {
  VectorField u(g);
  for (int i = 0; i < g.dim; ++i) u[i] = random_field(g, cutoff, rng, amp);
  return u;
}

/// Strictly positive random density: 1 + band-limited perturbation clipped to
/// a safe amplitude.
inline ScalarField random_density(const TorusGrid& g, int cutoff, std::mt19937_64& rng,
                                  double rel_amp = 0.2) {
  ScalarField pert = random_field(g, cutoff, rng, 1.0);
  const double m = std::max(cnstn::spectral::max_value(pert), -cnstn::spectral::min_value(pert));
  ScalarField rho = sample(g, [](const std::array<double, 3>&) { return 1.0; });
  if (m > 0.0) rho.add_scaled(pert, rel_amp / m);
  return rho;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  const auto& va = a.values();
  const auto& vb = b.values();
  double worst = 0.0;
  for (std::size_t j = 0; j < va.size(); ++j) worst = std::max(worst, std::abs(va[j] - vb[j]));
  return worst;
}

inline double max_abs(const ScalarField& a) {
  const auto& va = a.values();
  double worst = 0.0;
  for (double v : va) worst = std::max(worst, std::abs(v));
  return worst;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
  double worst = 0.0;
  for (int i = 0; i < a.dim(); ++i) worst = std::max(worst, max_abs_diff(a[i], b[i]));
  return worst;
}

/// Fresh per-test scratch directory under the process working directory
/// (ctest runs in the build tree).  Recreated empty on each construction.
struct ScratchDir {
  std::filesystem::path path;

  explicit ScratchDir(const std::string& name) {
    path = std::filesystem::path("test_scratch") / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }

  std::string file(const std::string& leaf) const { return (path / leaf).string(); }
};

/// Ordinary least squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace testutil
