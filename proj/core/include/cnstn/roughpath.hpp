#pragma once

#include <string>
#include <vector>

#include "cnstn/noise.hpp"

namespace cnstn::rough {

/// p-variation of a piecewise-linear path: the supremum over partitions of
/// sum |Z increments|^p, raised to 1/p.  For p >= 1 the supremum is attained
/// on partitions through the sample nodes (subdividing a straight segment
/// never increases the sum), so dynamic programming over node pairs is exact.
double p_variation(const noise::DriverPath& path, double p);

/// Two-index table omega(s, t) = (p-variation on [s, t])^p on the path nodes.
/// Superadditive and vanishing on the diagonal, i.e. a control.
class Control {
 public:
  Control(std::vector<double> times, std::vector<double> table);

  int nodes() const { return static_cast<int>(times_.size()); }
  const std::vector<double>& times() const { return times_; }
  /// omega(t_a, t_b) for node indices a <= b.
  double at(int a, int b) const;

  /// max over node triples a <= b <= c of omega(a,b) + omega(b,c) - omega(a,c);
  /// superadditivity means this is <= 0 up to roundoff.
  double superadditivity_defect() const;

 private:
  std::vector<double> times_;
  std::vector<double> table_;  // row-major nodes x nodes; only a <= b used
};

Control control_from_path(const noise::DriverPath& path, double p);

/// max over node triples a < b < c of the Frobenius norm of
///   ZZ_{ac} - ZZ_{ab} - ZZ_{bc} - Z_{ab} (x) Z_{bc},
/// i.e. the worst violation of Chen's relation.  Zero to roundoff for lifts
/// built by GeometricLift::from_path (the prefix-area representation makes
/// Chen hold identically, which is the point of the construction).
double chen_defect(const noise::GeometricLift& lift);

/// The same defect for one explicitly tabulated triple (s, b, t): windows are
/// free-standing K x K row-major arrays, nothing forces their consistency.
/// This is the formula chen_defect maximizes; it exists separately so fault
/// injection (hand-corrupted ZZ entries) can reach a nonzero value, which the
/// internally consistent lift never produces.
double chen_defect_triple(int K, const std::vector<double>& z_sb,
                          const std::vector<double>& z_bt,
                          const std::vector<double>& zz_sb,
                          const std::vector<double>& zz_bt,
                          const std::vector<double>& zz_st);

/// max over node pairs of || Sym ZZ_{ab} - 1/2 Z_{ab} (x) Z_{ab} ||_F.
/// Zero for geometric lifts; an Ito-style lift (diagonal shifted by
/// -1/2 (t-s) Id) shows up here while keeping a zero Chen defect.
double geometricity_defect(const noise::GeometricLift& lift);

/// Hoelder-scale size constants of the driver actions for constant
/// coefficients Q: the first-level action scales like |Z_{st}| max_k |Q_k|
/// and the second-level one like |ZZ_{st}| (max_k |Q_k|)^2, so we report
///   C_A1 = max over node pairs of |Z_{st}| max|Q| / (t-s)^alpha,
///   C_A2 = max over node pairs of |ZZ_{st}|_F max|Q|^2 / (t-s)^(2 alpha),
/// with alpha = 1/p.
struct RoughDriverNorms {
  double alpha = 0.0;
  double c_a1 = 0.0;
  double c_a2 = 0.0;
};

RoughDriverNorms driver_norms(const noise::QField& q, const noise::GeometricLift& lift,
                              double p);

/// One dyadic window [s, t] with the measured remainder norm.
struct RemainderEntry {
  int level = 0;
  double s = 0.0;
  double t = 0.0;
  double norm = 0.0;
};

/// Remainder norms over nested dyadic windows, plus the problem scale used
/// to decide whether the whole table is zero to roundoff.
struct RemainderTable {
  std::vector<RemainderEntry> entries;
  double scale = 1.0;

  int levels() const;
  double max_norm() const;
};

/// Result of the log-log regression of norm against window length.  Tables
/// whose every entry sits at roundoff (norm <= 1e-10 * scale) return the
/// `exact` sentinel instead of a meaningless slope through noise.
struct ExponentFit {
  bool exact = false;
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

ExponentFit fit_scaling_exponent(const RemainderTable& table);

/// CSV export, columns (level, s, t, norm).
void export_remainder_csv(const RemainderTable& table, const std::string& filename);

}  // namespace cnstn::rough
