#pragma once

#include <string>
#include <vector>

#include "cnstn/noise.hpp"
#include "cnstn/solver.hpp"

namespace cnstn::strat {

/// One pathwise stochastic integral int f dZ_k against a stored driver
/// component, by left-point (Ito) or midpoint (Stratonovich) sums.
struct IntegralResult {
  enum class Scheme { LeftPoint, Midpoint };
  double value = 0.0;
  Scheme scheme = Scheme::LeftPoint;
  int segments = 0;
};

/// f must carry one sample per driver node (f.size() == nodes); anything else
/// is a grid mismatch and throws std::invalid_argument.
IntegralResult ito_integral(const std::vector<double>& f, const noise::DriverPath& path,
                            int component);
IntegralResult stratonovich_integral(const std::vector<double>& f, const noise::DriverPath& path,
                                     int component);

/// Ito-to-Stratonovich correction operator for constant coefficients:
/// applies the Fourier multiplier -1/2 sum_k (Q_k . xi)^2 — i.e.
/// 1/2 sum_k (Q_k . grad)^2 — to the density.  Symmetric and negative
/// semidefinite; non-constant coefficient fields are out of scope and throw.
ScalarField correction_operator(const ScalarField& rho, const noise::QField& q);

/// Per-path gap S - I - C for the density equation tested with psi:
/// S, I are midpoint/left-point sums of F_k(t) = <rho(t), Q_k . grad psi>
/// against the recorded driver increments, and C = 1/2 sum_{k,i} G_{k,i}
/// dW_{k,i} with G_{k,i} the noise part of the recorded density update
/// tested the same way.  For the exact diffusion, E[S - I - C] = 0; the
/// scheme leaves O(dt).  psi must live in the recorded observable window.
double correction_gap(const solver::Trajectory& traj, const noise::QField& q,
                      const ScalarField& psi);

/// The gap together with |S| + |I| + |C|, the magnitude the ensemble verdict
/// is scaled against — lets callers reduce path by path without holding the
/// whole ensemble in memory.
struct GapSample {
  double gap = 0.0;
  double magnitude = 0.0;
};
GapSample correction_gap_sample(const solver::Trajectory& traj, const noise::QField& q,
                                const ScalarField& psi);

struct CorrectionStats {
  int n_paths = 0;
  double dt = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double scale = 0.0;      // typical |S| + |I| + |C| magnitude, for context
  bool degenerate = false; // all paths identical (seed wiring error)
  enum class Verdict { Pass, Warn, Fail } verdict = Verdict::Pass;
};

/// Ensemble mean/stderr of the per-path gaps; Warn beyond 3 sigma, Fail
/// beyond 5.  Fewer than two paths or zero spread is flagged degenerate.
CorrectionStats correction_stats(const std::vector<double>& gaps, double dt, double scale);

/// Convenience wrapper over an in-memory ensemble.
CorrectionStats correction_identity_check(const std::vector<solver::Trajectory>& ensemble,
                                          const noise::QField& q, const ScalarField& psi);

struct NoiseEnergySeries {
  std::vector<double> t;
  std::vector<double> cumulative;  // energy fed in by the noise up to t
  bool divergence_free = false;    // if true the series should sit at roundoff
};

NoiseEnergySeries noise_energy_contribution(const solver::Trajectory& traj,
                                            const noise::QField& q);

}  // namespace cnstn::strat
