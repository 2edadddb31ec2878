#pragma once

#include <array>
#include <complex>
#include <vector>

#include "cnstn/grid.hpp"

namespace cnstn {

/// Real scalar field on a TorusGrid, carried as a pair of lazily synchronized
/// representations: collocation values and the full complex coefficient cube
/// with the convention
///
///   f(x) = sum_k c_k exp(i k.x),    c_k = n^-dim sum_j f(x_j) exp(-i k.x_j),
///
/// so c_0 is the mean and conjugate symmetry c_{-k} = conj(c_k) holds for any
/// field built from real values.  Accessors trigger the FFT on demand;
/// mutating one representation invalidates the other.  Fields are plain
/// values: copies are independent and safe to hand to worker threads, while a
/// single instance must not be accessed concurrently (the usual container
/// contract).
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& g);
  static ScalarField from_values(const TorusGrid& g, std::vector<double> v);
  static ScalarField from_coeffs(const TorusGrid& g, std::vector<std::complex<double>> c);

  const TorusGrid& grid() const { return grid_; }

  const std::vector<double>& values() const;
  const std::vector<std::complex<double>>& coeffs() const;
  std::vector<double>& values_mut();
  std::vector<std::complex<double>>& coeffs_mut();

  /// Coefficient at an integer wavevector (0 outside the cube's band).
  std::complex<double> coeff(const std::array<int, 3>& k) const;
  double mean() const { return coeffs()[0].real(); }

  /// Drop the collocation-value cache, keeping coefficients only — halves the
  /// footprint of stored snapshots; values are recomputed on demand.
  void compact() const;

  // Linear arithmetic, performed on coefficients.
  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& add_scaled(const ScalarField& o, double s);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  TorusGrid grid_;
  mutable std::vector<double> values_;
  mutable std::vector<std::complex<double>> coeffs_;
  mutable bool values_ok_ = false;
  mutable bool coeffs_ok_ = false;

  void sync_values() const;
  void sync_coeffs() const;
};

/// Velocity-like field: one ScalarField per spatial component.
class VectorField {
 public:
  explicit VectorField(const TorusGrid& g);

  const TorusGrid& grid() const { return comps_.front().grid(); }
  int dim() const { return static_cast<int>(comps_.size()); }
  ScalarField& operator[](int i) { return comps_[static_cast<std::size_t>(i)]; }
  const ScalarField& operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  VectorField& add_scaled(const VectorField& o, double s);
  void compact() const {
    for (const auto& c : comps_) c.compact();
  }

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(VectorField a, double s) { return a *= s; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

 private:
  std::vector<ScalarField> comps_;
};

}  // namespace cnstn
