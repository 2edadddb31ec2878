#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnstn/field.hpp"
#include "cnstn/grid.hpp"
#include "cnstn/noise.hpp"

namespace cnstn::solver {

/// All scheme parameters in one bag.  Pressure law p(rho) = a rho^gamma
/// + delta rho^beta with potential P(rho) = a/(gamma-1) rho^gamma
/// + delta/(beta-1) rho^beta; viscous stress
/// S = mu stress_d_factor (grad u + grad u^T) + eta div u Id, so
/// div S = mu stress_d_factor lap u + (mu stress_d_factor + eta) grad div u.
/// stress_d_factor 1 reads the stress through the symmetric gradient
/// D(u) = (grad u + grad u^T)/2; factor 2 is the alternative normalization
/// that drops the 1/2 — both keep every audit identity, only coefficients
/// move, so the choice is exposed here instead of hard-coded.
struct SchemeParams {
  double gamma = 2.0;
  double a = 1.0;
  double mu = 0.1;
  double eta = 0.1;
  double epsilon = 0.0;  // parabolic regularization of the continuity equation
  double delta = 0.0;    // high-power pressure weight
  double beta = 5.0;     // high-power pressure exponent
  int m = 8;             // velocity Galerkin cutoff |k|_inf <= m
  double dt = 1e-3;
  double T = 0.5;
  double density_floor = 0.0;        // <= 0: resolved to 1e-8 * mean(rho0) at run start
  double stress_d_factor = 1.0;

  /// Throws std::invalid_argument naming the offending field.  The physical
  /// constraints: gamma > dim/2 and beta > max{4, gamma}.
  void validate(int dim) const;

  /// Padding factor for pointwise quadratures of the pressure law: the
  /// smallest factor whose grid integrates rho^max(gamma,beta) exactly for
  /// band-limited rho (exact for integer exponents, spectrally accurate
  /// otherwise).  Clamped to [2, 4].
  int quad_factor() const;
};

/// Discrete unknowns: full-band density, velocity supported in |k|_inf <= m.
struct GalerkinState {
  double t = 0.0;
  ScalarField rho;
  VectorField u;
  SchemeParams params;

  GalerkinState(const TorusGrid& g, const SchemeParams& p)
      : rho(g), u(g), params(p) {}
  const TorusGrid& grid() const { return rho.grid(); }
};

/// Hard abort of a run: density at or below the floor, or non-finite values.
/// Carries the time and the offending density minimum.  Never clipped or
/// repaired — a breached floor invalidates every ledger downstream.
struct BlowUp : std::runtime_error {
  double t;
  double min_rho;
  BlowUp(double t_, double min_rho_, const std::string& msg)
      : std::runtime_error(msg), t(t_), min_rho(min_rho_) {}
};

// ----------------------------------------------------------- pressure law --

/// p(rho) = a rho^gamma + delta rho^beta, evaluated pointwise on the padded
/// grid and truncated back.  Genuinely negative density throws BlowUp;
/// roundoff-level negative excursions of the padded interpolant (tiny
/// multiples of machine epsilon) are evaluated as zero.
ScalarField pressure(const ScalarField& rho, const SchemeParams& p);
/// P(rho) = a/(gamma-1) rho^gamma + delta/(beta-1) rho^beta, satisfying
/// P'(rho) rho - P(rho) = p(rho).
ScalarField pressure_potential(const ScalarField& rho, const SchemeParams& p);

/// Scalar version of the laws and their derivatives, shared with audits.
double pressure_value(double rho, const SchemeParams& p);
double pressure_potential_value(double rho, const SchemeParams& p);
double pressure_potential_prime(double rho, const SchemeParams& p);
double pressure_potential_second(double rho, const SchemeParams& p);

// --------------------------------------------------------------- stress ----

/// div S(u) = mu f lap u + (mu f + eta) grad div u, f = stress_d_factor.
VectorField stress_divergence(const VectorField& u, const SchemeParams& p);

// ------------------------------------------------------------ truncation --

/// L-infinity truncation: z for z <= k, constant 2k for z >= 3k, bridged on
/// [k, 3k] by the concave C^1 quadratic k (1 + (s-1) - (s-1)^2/4), s = z/k.
double truncation(double z, double k);
double truncation_prime(double z, double k);

// ---------------------------------------------------------- instantaneous --

/// Right-hand side of the density equation at a frozen driver slope w:
///   -div(rho u) + eps lap rho + sum_k div(rho Q_k) w_k,
/// every product dealiased; the spatial mean of the result is exactly 0.
ScalarField rhs_continuity(const GalerkinState& s, const noise::QField& q,
                           const std::vector<double>& w);

/// Right-hand side of the momentum equation, projected to |k|_inf <= m:
///   P_m[ -div(rho u (x) u) - grad p(rho) + div S(u) + eps lap(rho u)
///        + sum_k div(rho u (x) Q_k) w_k ].
VectorField rhs_momentum(const GalerkinState& s, const noise::QField& q,
                         const std::vector<double>& w);

/// Invert u |-> P_m(rho u) on the cutoff space by conjugate gradients
/// (symmetric positive definite for rho bounded below by a positive
/// constant).  Optional warm start; throws BlowUp when the density makes the
/// operator lose definiteness or the iteration stalls.
VectorField solve_velocity(const ScalarField& rho, const VectorField& q_target, int m,
                           const VectorField* warm_start = nullptr);

/// dt times an estimate of the stiffest explicitly-integrated rate
/// (advective + acoustic + viscous); values well above 1 mean the explicit
/// part of the step is outside its stability region.
double cfl_number(const GalerkinState& s);

// ------------------------------------------------------------ initial data --

/// Project to |k|_inf <= m, lift by an additive constant if the projection
/// dips below positivity_target, and rescale multiplicatively so the total
/// mass is exactly that of rho0.  Data already above the target come back
/// bit-identical to their projection.
ScalarField prepare_density(const ScalarField& rho0, int m, double positivity_target);
VectorField prepare_velocity(const VectorField& u0, int m);

// ------------------------------------------------------------- observables --

/// The low-mode coefficient window |k|_inf <= cutoff of a field: the data
/// needed to test a field against any trigonometric polynomial of that band.
/// Pairings: <f, g> = volume * sum_k Re(conj(g_k) f_k) when g is supported in
/// the window.
struct ModeBlock {
  int dim = 0;
  int cutoff = -1;
  std::vector<std::complex<double>> c;

  ModeBlock() = default;
  ModeBlock(int dim_, int cutoff_);
  static ModeBlock from_field(const ScalarField& f, int cutoff);

  int side() const { return 2 * cutoff + 1; }
  std::complex<double> at(const std::array<int, 3>& k) const;
  std::complex<double>& at(const std::array<int, 3>& k);
  ModeBlock& add_scaled(const ModeBlock& o, double s);
};

/// volume * sum_k Re(conj(g.c[k]) f.c[k]) — the L2 pairing of the fields the
/// blocks were read from, exact when one of them is band-limited to the
/// window.
double block_inner(const ModeBlock& f, const ModeBlock& g, double volume);

// -------------------------------------------------------------- time loop --

/// Everything recorded while one step ran.  Scalars are evaluated at the
/// end-of-step state; *_increment entries are already integrated over the
/// step (trapezoid in the state, the step's own driver increment in the
/// noise); the ModeBlocks split the realized update of each tested equation
/// into its deterministic part and the part proportional to the driver
/// increment, which is what the rough-remainder and covariation audits
/// consume.
struct StepRecord {
  double t = 0.0;  // end of the step
  double mass = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double dissipation_rate = 0.0;
  double eps_term_rate = 0.0;
  double eps_cross_rate = 0.0;
  double noise_increment = 0.0;          // ledger sign: minus the energy input
  double pressure_div_q_increment = 0.0; // int p(rho) div(sum_k Q_k dW_k) over the step
  std::vector<double> dW;                // driver increment, size K

  ModeBlock rho_block;                 // end-of-step density window
  std::vector<ModeBlock> q_block;      // end-of-step momentum window per component
  ModeBlock cont_drift, cont_noise;    // window of the step's density update, split
  std::vector<ModeBlock> mom_drift, mom_noise;  // same for momentum components
};

struct RunOptions {
  int block_cutoff = 3;  // observable window half-width
  int stride = 1;        // state decimation: keep every stride-th step
  double positivity_target = -1.0;  // < 0: 0.05 * mean(rho0)
};

/// A completed (or aborted) run: decimated state snapshots, one StepRecord
/// per step, and the t = 0 values of everything the records carry.
struct Trajectory {
  SchemeParams params;
  int K = 0;
  int block_cutoff = 3;
  double t0 = 0.0;

  double mass0 = 0.0, kinetic0 = 0.0, potential0 = 0.0;
  double dissipation_rate0 = 0.0, eps_term_rate0 = 0.0, eps_cross_rate0 = 0.0;
  ModeBlock rho_block0;
  std::vector<ModeBlock> q_block0;

  std::vector<double> sample_times;      // times of the stored snapshots
  std::vector<GalerkinState> states;     // decimated, coefficients only
  std::vector<StepRecord> steps;

  bool blew_up = false;
  double blowup_time = 0.0;
  double blowup_min_rho = 0.0;

  int steps_taken() const { return static_cast<int>(steps.size()); }
};

/// One Heun step: transport, pressure, stress and noise explicit with the
/// driver slope frozen at the step midpoint; the parabolic eps term by the
/// diagonal spectral multiplier (backward Euler in the predictor,
/// Crank-Nicolson in the corrector).  Mass is conserved bitwise: every
/// explicit term is a pure divergence with zero k = 0 coefficient.
GalerkinState step(const GalerkinState& s, const noise::QField& q,
                   const noise::DriverPath& driver);

/// Run from t = 0 to T.  Initial data are prepared (projection, positivity
/// lift, mass correction) internally; the momentum P_m(rho u) is carried
/// across steps exactly, so the recorded update blocks telescope without
/// re-projection error.  A floor breach flags the trajectory and returns the
/// part completed instead of throwing.
Trajectory run(const ScalarField& rho0, const VectorField& u0, const SchemeParams& params,
               const noise::QField& q, const noise::DriverPath& driver,
               const RunOptions& opts = {});

}  // namespace cnstn::solver
