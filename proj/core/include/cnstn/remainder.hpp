#pragma once

#include <array>
#include <vector>

#include "cnstn/noise.hpp"
#include "cnstn/roughpath.hpp"
#include "cnstn/solver.hpp"

namespace cnstn::rough {

/// One real trigonometric test mode cos(k.x) or sin(k.x) with its W^{3,inf}
/// norm max(1, |k|_inf^3).  Modes are enumerated over a half lattice so the
/// basis is linearly independent.
struct TestMode {
  std::array<int, 3> k{0, 0, 0};
  bool sine = false;
  double w3inf = 1.0;
};

std::vector<TestMode> test_basis(int dim, int cutoff);

/// Two-parameter rough remainder of a trajectory against the geometric lift
/// of its own driver (constant coefficients only).  For each dyadic window
/// [s, t] at levels 1..max_level the remainder of the density equation and
/// of every momentum component is evaluated on the test basis:
///
///   v(s,t; psi) = delta<f, psi> - delta(drift integral)(psi)
///                 + sum_k <f_s, Q_k . grad psi> Z^k_{s,t}
///                 - sum_{l,k} <f_s, Q_l . grad (Q_k . grad psi)> ZZ^{lk}_{s,t}
///
/// and the window's norm is the sup over equations and modes of
/// |v| / ||psi||_{W^{3,inf}}.  The drift integral telescopes the recorded
/// per-step update blocks, so v is exact for the scheme up to the stochastic
/// expansion — its size measures rough-path regularity, not quadrature.
///
/// The lift must be built on the trajectory's step grid (nodes == steps + 1).
/// The table's scale field is set from the observable magnitudes so an
/// all-zero table (noise-free runs) can be recognized as exact.
RemainderTable remainder_table(const solver::Trajectory& traj, const noise::QField& q,
                               const noise::GeometricLift& lift, int max_level);

}  // namespace cnstn::rough
