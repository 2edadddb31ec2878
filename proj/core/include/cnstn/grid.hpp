#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace cnstn {

/// Uniform collocation grid on the torus [0,2pi)^dim together with a Galerkin
/// cutoff.  Spectral arrays over this grid are full complex cubes indexed by
/// integer wavevectors k with |k_i| <= points/2 in standard FFT layout
/// (index j maps to k = j for j < n/2 and k = j - n otherwise).
///
/// The velocity space X_m is the span of modes with |k|_inf <= modes; the
/// density is carried at full grid resolution.  points must be even and at
/// least 2*modes + 2 so that X_m sits strictly inside the resolvable band.
struct TorusGrid {
  int dim;
  int modes;
  int points;

  TorusGrid(int dim_, int modes_, int points_);

  std::size_t size() const { return size_; }
  double volume() const;                      // (2pi)^dim
  std::size_t axis_stride(int axis) const;    // row-major, axis 0 slowest

  /// Wavenumber of a 1-d index in FFT layout.
  int wavenumber(int index) const { return index <= points / 2 ? index : index - points; }

  /// Per-axis indices of a flat index (unused axes read 0).
  std::array<int, 3> unravel(std::size_t flat) const;
  std::size_t ravel(const std::array<int, 3>& idx) const;

  /// Integer wavevector of a flat spectral index (unused axes read 0).
  std::array<int, 3> wavevector(std::size_t flat) const;
  /// Flat index of an integer wavevector (components folded mod n).
  std::size_t index_of(const std::array<int, 3>& k) const;

  /// Collocation abscissae 2pi j/n along one axis.
  std::vector<double> axis_points() const;

  /// max_i |k_i|
  static int band(const std::array<int, 3>& k);

  bool operator==(const TorusGrid& o) const {
    return dim == o.dim && modes == o.modes && points == o.points;
  }

 private:
  std::size_t size_;
};

}  // namespace cnstn
