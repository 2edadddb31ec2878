#pragma once

#include <complex>
#include <vector>

#include "cnstn/field.hpp"
#include "cnstn/grid.hpp"

namespace cnstn::spectral {

/// Return a copy with the named representation materialized.
ScalarField to_spectral(const ScalarField& f);
ScalarField to_physical(const ScalarField& f);

/// Exact derivative of the trigonometric interpolant along one axis
/// (multiplier i*k_axis).  The Nyquist plane |k_a| = n/2 is zeroed: its
/// derivative vanishes at every collocation point anyway, and keeping it
/// would break conjugate symmetry.
ScalarField derivative(const ScalarField& f, int axis);
ScalarField laplacian(const ScalarField& f);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);

/// Galerkin projection: zero every coefficient with |k|_inf > cutoff.
ScalarField project_modes(const ScalarField& f, int cutoff);
VectorField project_modes(const VectorField& v, int cutoff);

/// grad o inverse Laplacian: component i carries multiplier -i k_i/|k|^2,
/// the k = 0 mode is dropped.
VectorField riesz_grad(const ScalarField& f);
/// d_i d_j o inverse Laplacian: multiplier k_i k_j/|k|^2, k = 0 dropped.
ScalarField riesz_double(const ScalarField& f, int i, int j);

/// integral over the torus: (2pi)^dim times the k = 0 coefficient.
double integrate(const ScalarField& f);

/// L2 pairing by Parseval; equals the exact integral of f*g whenever
/// band(f) + band(g) < points (no wrap-around in the discrete sum).
double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& f, const VectorField& g);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
/// Collocation quadrature of |f| (plain, |f| is not band-limited).
double l1_norm(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

/// Copy onto a finer grid with n_target points per axis (coefficients embed,
/// values refine).  The source Nyquist plane is dropped; the working band of
/// every evolved field is |k|_inf <= n/2 - 1 so nothing is lost.
ScalarField pad(const ScalarField& f, int n_target);
/// Restrict onto a coarser grid, keeping |k|_inf <= n_target/2 - 1.
ScalarField truncate_to(const ScalarField& f, int n_target);

/// Dealiased product: both factors are zero-padded to 2n, multiplied
/// pointwise, and the result truncated back.  The product of fields with
/// band <= n/2 is exact on the padded grid, so truncation is a clean
/// projection and no aliased energy enters the retained band.  Cubic terms
/// are handled by applying this pairwise.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
VectorField multiply(const ScalarField& a, const VectorField& b);

/// Low-pass smoothing at scale eta: projection onto |k|_inf <= floor(1/eta),
/// so (id - smoothing) is supported on modes above 1/eta and its L2 norm is
/// bounded by eta * ||grad f||_L2.
ScalarField smoothing(const ScalarField& f, double eta);
VectorField smoothing(const VectorField& v, double eta);

/// Mode filter for products formed in place on the n-grid: zeroes modes with
/// |k|_inf > n/(order+1), order = power of the nonlinearity.  The solver
/// itself forms products by zero-padding (see multiply); this filter is the
/// fallback rule applied when a caller wants same-grid products.
ScalarField dealias(const ScalarField& f, int order = 3);

/// Pointwise lift fn(f) evaluated on the factor*n padded grid, truncated
/// back: anti-aliased evaluation of nonlinear composition.  factor 2 covers
/// quadratic/cubic compositions exactly; a degree-d polynomial law needs
/// factor*n to exceed d*(n/2 - 1), e.g. factor 3 for d = 5.
template <typename F>
ScalarField map_pointwise_padded(const ScalarField& f, F&& fn, int factor = 2) {
  ScalarField pf = pad(f, factor * f.grid().points);
  auto& v = pf.values_mut();
  for (auto& x : v) x = fn(x);
  return truncate_to(pf, f.grid().points);
}

/// Collocation quadrature of fn(f) on the factor*n padded grid.
template <typename F>
double integrate_pointwise_padded(const ScalarField& f, F&& fn, int factor = 2) {
  ScalarField pf = pad(f, factor * f.grid().points);
  const auto& v = pf.values();
  double acc = 0.0, comp = 0.0;
  for (double x : v) {  // Kahan: these sums feed tight ledger tolerances
    double y = fn(x) - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return f.grid().volume() * acc / static_cast<double>(v.size());
}

/// Same with two fields sampled on the common padded grid.
template <typename F>
double integrate_pointwise_padded(const ScalarField& f, const ScalarField& g, F&& fn,
                                  int factor = 2) {
  ScalarField pf = pad(f, factor * f.grid().points);
  ScalarField pg = pad(g, factor * g.grid().points);
  const auto& vf = pf.values();
  const auto& vg = pg.values();
  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < vf.size(); ++i) {
    double y = fn(vf[i], vg[i]) - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return f.grid().volume() * acc / static_cast<double>(vf.size());
}

}  // namespace cnstn::spectral
