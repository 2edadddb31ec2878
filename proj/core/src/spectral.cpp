#include "cnstn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnstn::spectral {

namespace {

// Modes with a component on the Nyquist plane |k_a| = n/2 have no conjugate
// partner in the cube, so odd multipliers (i*k and friends) would break the
// realness of the field.  Every multiplier op zeroes them; evolved fields
// keep the working band |k|_inf <= n/2 - 1, so nothing of substance is lost.
bool on_nyquist(const TorusGrid& g, const std::array<int, 3>& k) {
  for (int a = 0; a < g.dim; ++a)
    if (std::abs(k[a]) * 2 == g.points) return true;
  return false;
}

double kahan_mean(const std::vector<double>& v) {
  double acc = 0.0, comp = 0.0;
  for (double x : v) {
    double y = x - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return acc / static_cast<double>(v.size());
}

template <typename Mult>
ScalarField apply_multiplier(const ScalarField& f, Mult&& m) {
  const TorusGrid& g = f.grid();
  std::vector<std::complex<double>> out(g.size());
  const auto& c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto k = g.wavevector(i);
    out[i] = on_nyquist(g, k) ? std::complex<double>{0.0, 0.0} : m(k) * c[i];
  }
  return ScalarField::from_coeffs(g, std::move(out));
}

double ksq(const std::array<int, 3>& k) {
  return static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
         static_cast<double>(k[2]) * k[2];
}

}  // namespace

ScalarField to_spectral(const ScalarField& f) {
  ScalarField g = f;
  g.coeffs();
  return g;
}

ScalarField to_physical(const ScalarField& f) {
  ScalarField g = f;
  g.values();
  return g;
}

ScalarField derivative(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim) throw std::invalid_argument("derivative: bad axis");
  return apply_multiplier(f, [axis](const std::array<int, 3>& k) {
    return std::complex<double>(0.0, static_cast<double>(k[axis]));
  });
}

ScalarField laplacian(const ScalarField& f) {
  return apply_multiplier(
      f, [](const std::array<int, 3>& k) { return std::complex<double>(-ksq(k), 0.0); });
}

VectorField gradient(const ScalarField& f) {
  VectorField g(f.grid());
  for (int a = 0; a < f.grid().dim; ++a) g[a] = derivative(f, a);
  return g;
}

ScalarField divergence(const VectorField& v) {
  ScalarField d = derivative(v[0], 0);
  for (int a = 1; a < v.dim(); ++a) d += derivative(v[a], a);
  return d;
}

ScalarField project_modes(const ScalarField& f, int cutoff) {
  const TorusGrid& g = f.grid();
  std::vector<std::complex<double>> out(g.size(), {0.0, 0.0});
  const auto& c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (TorusGrid::band(g.wavevector(i)) <= cutoff) out[i] = c[i];
  return ScalarField::from_coeffs(g, std::move(out));
}

VectorField project_modes(const VectorField& v, int cutoff) {
  VectorField out(v.grid());
  for (int a = 0; a < v.dim(); ++a) out[a] = project_modes(v[a], cutoff);
  return out;
}

VectorField riesz_grad(const ScalarField& f) {
  VectorField out(f.grid());
  for (int a = 0; a < f.grid().dim; ++a) {
    out[a] = apply_multiplier(f, [a](const std::array<int, 3>& k) {
      double k2 = ksq(k);
      if (k2 == 0.0) return std::complex<double>{0.0, 0.0};
      return std::complex<double>(0.0, -static_cast<double>(k[a]) / k2);
    });
  }
  return out;
}

ScalarField riesz_double(const ScalarField& f, int i, int j) {
  const int d = f.grid().dim;
  if (i < 0 || i >= d || j < 0 || j >= d) throw std::invalid_argument("riesz_double: bad axis");
  return apply_multiplier(f, [i, j](const std::array<int, 3>& k) {
    double k2 = ksq(k);
    if (k2 == 0.0) return std::complex<double>{0.0, 0.0};
    return std::complex<double>(static_cast<double>(k[i]) * static_cast<double>(k[j]) / k2, 0.0);
  });
}

double integrate(const ScalarField& f) { return f.grid().volume() * f.coeffs()[0].real(); }

double inner(const ScalarField& f, const ScalarField& g) {
  const auto& a = f.coeffs();
  const auto& b = g.coeffs();
  if (a.size() != b.size()) throw std::invalid_argument("inner: grid mismatch");
  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double y = (a[i].real() * b[i].real() + a[i].imag() * b[i].imag()) - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return f.grid().volume() * acc;
}

double inner(const VectorField& f, const VectorField& g) {
  double s = 0.0;
  for (int a = 0; a < f.dim(); ++a) s += inner(f[a], g[a]);
  return s;
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double l2_norm(const VectorField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double l1_norm(const ScalarField& f) {
  const auto& v = f.values();
  std::vector<double> av(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) av[i] = std::abs(v[i]);
  return f.grid().volume() * kahan_mean(av);
}

double min_value(const ScalarField& f) {
  const auto& v = f.values();
  return *std::min_element(v.begin(), v.end());
}

double max_value(const ScalarField& f) {
  const auto& v = f.values();
  return *std::max_element(v.begin(), v.end());
}

ScalarField pad(const ScalarField& f, int n_target) {
  const TorusGrid& g = f.grid();
  if (n_target < g.points) throw std::invalid_argument("pad: target grid is coarser");
  if (n_target == g.points) return f;
  TorusGrid gt(g.dim, g.modes, n_target);
  std::vector<std::complex<double>> out(gt.size(), {0.0, 0.0});
  const auto& c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto k = g.wavevector(i);
    if (on_nyquist(g, k)) continue;
    out[gt.index_of(k)] = c[i];
  }
  return ScalarField::from_coeffs(gt, std::move(out));
}

ScalarField truncate_to(const ScalarField& f, int n_target) {
  const TorusGrid& g = f.grid();
  if (n_target > g.points) throw std::invalid_argument("truncate_to: target grid is finer");
  if (n_target == g.points) return f;
  TorusGrid gt(g.dim, std::min(g.modes, n_target / 2 - 1), n_target);
  std::vector<std::complex<double>> out(gt.size(), {0.0, 0.0});
  const auto& c = f.coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto k = gt.wavevector(i);
    if (on_nyquist(gt, k)) continue;
    out[i] = c[g.index_of(k)];
  }
  return ScalarField::from_coeffs(gt, std::move(out));
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  const TorusGrid& g = a.grid();
  if (!(g == b.grid())) throw std::invalid_argument("multiply: grid mismatch");
  const int np = 2 * g.points;
  ScalarField pa = pad(a, np);
  ScalarField pb = pad(b, np);
  auto& va = pa.values_mut();
  const auto& vb = pb.values();
  for (std::size_t i = 0; i < va.size(); ++i) va[i] *= vb[i];
  return truncate_to(pa, g.points);
}

VectorField multiply(const ScalarField& a, const VectorField& b) {
  const TorusGrid& g = a.grid();
  const int np = 2 * g.points;
  ScalarField pa = pad(a, np);
  const auto& va = pa.values();
  VectorField out(g);
  for (int c = 0; c < b.dim(); ++c) {
    ScalarField pb = pad(b[c], np);
    auto& vb = pb.values_mut();
    for (std::size_t i = 0; i < vb.size(); ++i) vb[i] *= va[i];
    out[c] = truncate_to(pb, g.points);
  }
  return out;
}

ScalarField dealias(const ScalarField& f, int order) {
  if (order < 1) throw std::invalid_argument("dealias: order must be >= 1");
  return project_modes(f, f.grid().points / (order + 1));
}

ScalarField smoothing(const ScalarField& f, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("smoothing: eta must be positive");
  return project_modes(f, static_cast<int>(std::floor(1.0 / eta)));
}

VectorField smoothing(const VectorField& v, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("smoothing: eta must be positive");
  return project_modes(v, static_cast<int>(std::floor(1.0 / eta)));
}

}  // namespace cnstn::spectral
