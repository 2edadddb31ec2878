#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cnstn/field.hpp"
#include "cnstn/grid.hpp"

namespace cnstn::noise {

/// Spatial noise coefficients Q = (Q_1, ..., Q_K), each a vector field on the
/// torus.  Three constructions:
///   - constant:        Q_k(x) = q_k, a fixed vector (divergence-free trivially)
///   - streamfunction:  Q_k = (d2 psi_k, -d1 psi_k) for scalar psi_k (2-d,
///                      divergence-free by construction, spectrally exact)
///   - components:      raw component fields, not necessarily divergence-free;
///                      meant for deliberate-violation diagnostics only.
class QField {
 public:
  enum class Kind { Constant, Smooth };

  /// The no-noise object: K = 0, constant kind, trivially divergence-free.
  static QField none(const TorusGrid& g);
  static QField constant(const TorusGrid& g, std::vector<std::vector<double>> vectors);
  static QField streamfunction(const TorusGrid& g, const std::vector<ScalarField>& streams);
  static QField from_components(const TorusGrid& g, std::vector<VectorField> comps);

  Kind kind() const { return kind_; }
  bool constant_in_space() const { return kind_ == Kind::Constant; }
  int K() const { return K_; }
  const TorusGrid& grid() const { return grid_; }

  /// Constant kind only: the coefficient vector of component k.
  const std::vector<double>& vec(int k) const;
  /// Materialized vector field of component k (any kind).
  const VectorField& field(int k) const;

  double sup_norm(int k) const { return sup_norm_[static_cast<std::size_t>(k)]; }
  /// max over x of max(|Q_k|, |grad Q_k|, |grad^2 Q_k|) componentwise
  double w2inf_norm(int k) const { return w2inf_norm_[static_cast<std::size_t>(k)]; }
  double max_sup_norm() const;

  ScalarField divergence(int k) const;
  /// max_k sup |div Q_k|; 0 to roundoff unless built from raw components
  double max_divergence() const;

 private:
  QField(const TorusGrid& g, Kind kind);

  TorusGrid grid_;
  Kind kind_;
  int K_ = 0;
  std::vector<std::vector<double>> vectors_;  // Constant
  std::vector<VectorField> fields_;           // materialized for all kinds
  std::vector<double> sup_norm_;
  std::vector<double> w2inf_norm_;

  void cache_norms();
};

/// Sampled driver path t -> Z(t) in R^K, interpreted piecewise-linearly
/// between nodes.  Brownian drivers, their dyadic mollifications, and smooth
/// deterministic drivers all live in this one representation.
struct DriverPath {
  std::vector<double> times;                // M+1 increasing nodes, times[0] = 0
  std::vector<std::vector<double>> values;  // values[i] in R^K

  int K() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
  int segments() const { return static_cast<int>(times.size()) - 1; }
  double T() const { return times.back(); }

  /// Index of the segment containing t (clamped to [0, segments-1]).
  int segment_index(double t) const;
  std::vector<double> value_at(double t) const;
  /// Slope of the segment containing t; constant per segment.
  std::vector<double> slope_at(double t) const;
  std::vector<double> increment(int node_a, int node_b) const;

  void validate() const;  // throws on non-increasing times or ragged values
};

/// Brownian sample on a uniform grid of `steps` segments over [0,T]:
/// increments are sqrt(dt) * N(0,1) drawn from the counter stream keyed by
/// (seed, realization, component), so ensembles reproduce independently of
/// evaluation order.
DriverPath sample_brownian(int K, double T, int steps, std::uint64_t seed,
                           std::uint64_t realization = 0);

struct Wave {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

/// Deterministic C^1 driver W_k(t) = linear_k t + sum_j amp sin(freq t + phase),
/// sampled on a uniform grid of `steps` segments.
struct SmoothDriverSpec {
  std::vector<double> linear;            // per component
  std::vector<std::vector<Wave>> waves;  // per component
};
DriverPath smooth_driver(const SmoothDriverSpec& spec, double T, int steps);

/// Piecewise-linear interpolation of `path` on the dyadic grid with 2^level
/// segments — the Wong-Zakai approximation family.  Nodes of the result read
/// the original path at dyadic times.
DriverPath mollify(const DriverPath& path, int level);

/// Per-segment slopes, [segment][component].
std::vector<std::vector<double>> derivative_steps(const DriverPath& path);

/// First- and second-level increments of a piecewise-linear path:
///   Z_{st} = Z_t - Z_s,   ZZ_{st} = int_s^t (Z_r - Z_s) (x) dZ_r,
/// with the segment integrals in closed form (the lift is exact for the
/// piecewise-linear path, not a quadrature).  Increments between arbitrary
/// nodes come from prefix tables via
///   ZZ_{st} = A_t - A_s - (Z_s - Z_0) (x) (Z_t - Z_s),
/// which reproduces Chen's relation to roundoff by construction.
class GeometricLift {
 public:
  static GeometricLift from_path(const DriverPath& path);
  /// Raw constructor for tests (e.g. deliberately corrupted tables):
  /// prefix_area[i] is A_{t_i} row-major K x K.
  GeometricLift(std::vector<double> times, std::vector<std::vector<double>> values,
                std::vector<std::vector<double>> prefix_area);

  int K() const { return K_; }
  int nodes() const { return static_cast<int>(times_.size()); }
  const std::vector<double>& times() const { return times_; }

  std::vector<double> first_level(int a, int b) const;   // Z_{ab}, size K
  std::vector<double> second_level(int a, int b) const;  // ZZ_{ab}, row-major K*K

  /// Raw table rows, for allocation-free sweeps over many node pairs.
  const std::vector<double>& node_value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& prefix_area(int i) const { return prefix_[static_cast<std::size_t>(i)]; }

  /// Euclidean norm of Z_{ab} and Frobenius norm of ZZ_{ab}.
  double first_level_norm(int a, int b) const;
  double second_level_norm(int a, int b) const;

 private:
  int K_ = 0;
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> prefix_;
};

/// CSV round-trip for driver paths (schema: "t, Z_1, ..., Z_K").
void export_path_csv(const DriverPath& path, std::ostream& os);
void export_path_csv(const DriverPath& path, const std::string& filename);
DriverPath import_path_csv(std::istream& is);
DriverPath import_path_csv(const std::string& filename);

}  // namespace cnstn::noise
