#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cnstn/noise.hpp"
#include "cnstn/solver.hpp"

namespace cnstn::diag {

/// (kinetic, potential) = (1/2 int rho |u|^2, int P(rho)), both by the same
/// quadrature the solver records use.
std::pair<double, double> energy(const solver::GalerkinState& s);

/// (total mass, total momentum vector).
std::pair<double, std::vector<double>> mass_momentum(const solver::GalerkinState& s);

// -- Instantaneous rates -----------------------------------------------------
// Shared between the in-run records and any post-hoc recomputation, so the
// audit residual isolates time-integration error rather than quadrature
// mismatch.

/// int 2 mu f |D(u)|^2 + eta (div u)^2, assembled as a sum of squares.
double dissipation_rate(const solver::GalerkinState& s);
/// eps int P''(rho) |grad rho|^2.
double eps_term_rate(const solver::GalerkinState& s);
/// eps [ <grad(rho u), grad u> - 1/2 <grad rho, grad |u|^2> ]; analytically
/// eps int rho |grad u|^2 >= 0.
double eps_cross_rate(const solver::GalerkinState& s);
/// Rate at which the transport noise feeds energy into the budget at driver
/// slope w: <P'(rho), N_c> - 1/2 <N_c, |u|^2> + <N_m, u> with N_c, N_m the
/// noise fields the scheme actually applies.  Identically 0 for constant
/// divergence-free Q; equal to int p(rho) div(sum w_k Q_k) in general.
double noise_energy_input_rate(const solver::GalerkinState& s, const noise::QField& q,
                               const std::vector<double>& w);
/// int p(rho) div(sum_k w_k Q_k) — the term the energy budget picks up when
/// the coefficients fail to be divergence-free.
double pressure_div_q_rate(const solver::GalerkinState& s, const noise::QField& q,
                           const std::vector<double>& w);

// -- Energy ledger -----------------------------------------------------------

/// Cumulative budget terms per step.  residual = E(t) - E(0)
/// + dissipation_cum + eps_term_cum + eps_cross_cum + noise_cum, where
/// noise_cum carries the ledger sign (minus the energy input), so a perfect
/// balance reads 0.
struct EnergyLedgerRow {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double dissipation_cum = 0.0;
  double eps_term_cum = 0.0;
  double eps_cross_cum = 0.0;
  double noise_cum = 0.0;
  double residual = 0.0;
};

std::vector<EnergyLedgerRow> energy_audit(const solver::Trajectory& traj);
void export_ledger_csv(const std::vector<EnergyLedgerRow>& rows, const std::string& filename);

// -- Pressure integrability --------------------------------------------------

struct PressureWeight {
  double value = 0.0;
  double theta = 0.0;
  double theta_limit = 0.0;  // (2/N) gamma - 1
  bool theta_admissible = true;
};

/// Space-time quadrature of p(rho) rho^theta over the stored snapshots.
/// theta outside (0, (2/N) gamma - 1) is flagged but still computed.
PressureWeight pressure_weight(const solver::Trajectory& traj, double theta_exp);

// -- Effective viscous flux --------------------------------------------------

struct FluxPairSeries {
  double k = 0.0;
  std::vector<double> t;
  std::vector<double> value;  // int (p(rho) - (eta + 2 mu f) div u) T_k(rho)
};

FluxPairSeries flux_pair(const solver::Trajectory& traj, double k);

// -- Nonlocal commutator ------------------------------------------------------

/// sum over k, i, j of
///   int u_i ( rho R_ij[rho Q_jk] - rho Q_jk R_ij[rho] ) dx,
/// R_ij the double Riesz operator.  Cancels identically for constant Q.
double commutator_J5(const solver::GalerkinState& s, const noise::QField& q);
/// The a-priori size ||u||_L2 ||rho||_L4^2 max_k ||Q_k||_W1inf used to scale
/// the cancellation tolerance.
double commutator_J5_scale(const solver::GalerkinState& s, const noise::QField& q);

// -- rho ln rho balance -------------------------------------------------------

struct RhoLogRhoSeries {
  std::vector<double> t;
  std::vector<double> value;     // int rho ln rho at sample times
  std::vector<double> residual;  // value(t) - value(0) + int_0^t int rho div u (+ noise term)
};

/// Balance of the rho ln rho functional along the trajectory; the residual
/// is expected O(dt + eps) (the eps-regularization pays -eps int |grad
/// rho|^2 / rho, which is not added back).  Pass q/driver to include the
/// divergence-of-Q term when the coefficients are not divergence-free.
RhoLogRhoSeries rho_log_rho(const solver::Trajectory& traj, const noise::QField* q = nullptr,
                            const noise::DriverPath* driver = nullptr);

// -- Renormalized continuity --------------------------------------------------

/// A scalar renormalization theta with its derivative; the balance needs
/// theta' to vanish for large density (truncation_theta does; identity_theta
/// does not and sets the warning flag).
struct ThetaSpec {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  bool derivative_compactly_supported = true;
};

ThetaSpec truncation_theta(double k);
ThetaSpec identity_theta();

struct RenormSeries {
  std::vector<double> t;
  std::vector<double> residual;
  bool theta_warning = false;
};

/// Residual of the renormalized density balance tested with psi:
///   d/dt <theta(rho), psi> = <theta(rho) u, grad psi>
///                            - <(theta'(rho) rho - theta(rho)) div u, psi>
///                            + noise terms,
/// accumulated by trapezoid over the stored snapshots.  Expected O(dt + eps)
/// on resolved runs.
RenormSeries renorm_residual(const solver::Trajectory& traj, const ThetaSpec& theta,
                             const ScalarField& psi, const noise::QField* q = nullptr,
                             const noise::DriverPath* driver = nullptr);

}  // namespace cnstn::diag
