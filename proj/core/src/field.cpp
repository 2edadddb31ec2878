#include "cnstn/field.hpp"

#include <stdexcept>

#include "cnstn/fft.hpp"

namespace cnstn {

ScalarField::ScalarField(const TorusGrid& g)
    : grid_(g),
      values_(g.size(), 0.0),
      coeffs_(g.size(), {0.0, 0.0}),
      values_ok_(true),
      coeffs_ok_(true) {}

ScalarField ScalarField::from_values(const TorusGrid& g, std::vector<double> v) {
  if (v.size() != g.size()) throw std::invalid_argument("from_values: size mismatch");
  ScalarField f(g);
  f.values_ = std::move(v);
  f.values_ok_ = true;
  f.coeffs_ok_ = false;
  return f;
}

ScalarField ScalarField::from_coeffs(const TorusGrid& g, std::vector<std::complex<double>> c) {
  if (c.size() != g.size()) throw std::invalid_argument("from_coeffs: size mismatch");
  ScalarField f(g);
  f.coeffs_ = std::move(c);
  f.coeffs_ok_ = true;
  f.values_ok_ = false;
  return f;
}

void ScalarField::sync_coeffs() const {
  if (coeffs_ok_) return;
  coeffs_.resize(grid_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) coeffs_[i] = values_[i];
  fft::forward(grid_.dim, grid_.points, coeffs_.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& c : coeffs_) c *= scale;
  coeffs_ok_ = true;
}

void ScalarField::sync_values() const {
  if (values_ok_) return;
  std::vector<std::complex<double>> work = coeffs_;
  fft::backward(grid_.dim, grid_.points, work.data());
  values_.resize(grid_.size());
  // real fields only: the imaginary residue is FFT roundoff
  for (std::size_t i = 0; i < work.size(); ++i) values_[i] = work[i].real();
  values_ok_ = true;
}

const std::vector<double>& ScalarField::values() const {
  sync_values();
  return values_;
}

const std::vector<std::complex<double>>& ScalarField::coeffs() const {
  sync_coeffs();
  return coeffs_;
}

std::vector<double>& ScalarField::values_mut() {
  sync_values();
  coeffs_ok_ = false;
  return values_;
}

std::vector<std::complex<double>>& ScalarField::coeffs_mut() {
  sync_coeffs();
  values_ok_ = false;
  return coeffs_;
}

void ScalarField::compact() const {
  sync_coeffs();
  values_.clear();
  values_.shrink_to_fit();
  values_ok_ = false;
}

std::complex<double> ScalarField::coeff(const std::array<int, 3>& k) const {
  for (int a = 0; a < grid_.dim; ++a)
    if (k[a] < -grid_.points / 2 || k[a] > grid_.points / 2) return {0.0, 0.0};
  return coeffs()[grid_.index_of(k)];
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return add_scaled(o, 1.0); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return add_scaled(o, -1.0); }

ScalarField& ScalarField::operator*=(double s) {
  auto& c = coeffs_mut();
  for (auto& v : c) v *= s;
  return *this;
}

ScalarField& ScalarField::add_scaled(const ScalarField& o, double s) {
  if (!(grid_ == o.grid())) throw std::invalid_argument("field arithmetic: grid mismatch");
  const auto& oc = o.coeffs();
  auto& c = coeffs_mut();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += s * oc[i];
  return *this;
}

VectorField::VectorField(const TorusGrid& g) {
  comps_.reserve(static_cast<std::size_t>(g.dim));
  for (int i = 0; i < g.dim; ++i) comps_.emplace_back(g);
}

VectorField& VectorField::operator+=(const VectorField& o) { return add_scaled(o, 1.0); }
VectorField& VectorField::operator-=(const VectorField& o) { return add_scaled(o, -1.0); }

VectorField& VectorField::operator*=(double s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

VectorField& VectorField::add_scaled(const VectorField& o, double s) {
  for (int i = 0; i < dim(); ++i) comps_[static_cast<std::size_t>(i)].add_scaled(o[i], s);
  return *this;
}

}  // namespace cnstn
