#include "cnstn/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cnstn {

TorusGrid::TorusGrid(int dim_, int modes_, int points_)
    : dim(dim_), modes(modes_), points(points_) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("TorusGrid: dim must be 1, 2 or 3");
  if (modes < 1) throw std::invalid_argument("TorusGrid: modes must be >= 1");
  if (points % 2 != 0 || points < 2 * modes + 2)
    throw std::invalid_argument("TorusGrid: points must be even and >= 2*modes + 2 (got " +
                                std::to_string(points) + " for modes " + std::to_string(modes) +
                                ")");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);
}

double TorusGrid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= 2.0 * std::numbers::pi;
  return v;
}

std::size_t TorusGrid::axis_stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(points);
  return s;
}

std::array<int, 3> TorusGrid::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points);
    flat /= points;
  }
  return idx;
}

std::size_t TorusGrid::ravel(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = flat * points + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::array<int, 3> TorusGrid::wavevector(std::size_t flat) const {
  std::array<int, 3> idx = unravel(flat);
  std::array<int, 3> k{0, 0, 0};
  for (int a = 0; a < dim; ++a) k[a] = wavenumber(idx[a]);
  return k;
}

std::size_t TorusGrid::index_of(const std::array<int, 3>& k) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    int j = k[a] % points;
    if (j < 0) j += points;
    idx[a] = j;
  }
  return ravel(idx);
}

std::vector<double> TorusGrid::axis_points() const {
  std::vector<double> x(points);
  for (int j = 0; j < points; ++j) x[j] = 2.0 * std::numbers::pi * j / points;
  return x;
}

int TorusGrid::band(const std::array<int, 3>& k) {
  int b = 0;
  for (int a = 0; a < 3; ++a) b = std::max(b, std::abs(k[a]));
  return b;
}

}  // namespace cnstn
