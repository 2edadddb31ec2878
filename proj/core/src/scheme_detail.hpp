#pragma once

// Internal helpers shared by the time stepper and the diagnostics: the
// effective noise coefficient B = sum_k w_k Q_k at a frozen driver slope w,
// and the noise fields the scheme applies to each equation.  Everything here
// is linear in w, so one B evaluation serves all K components per stage.

#include <optional>
#include <vector>

#include "cnstn/field.hpp"
#include "cnstn/noise.hpp"

namespace cnstn::solver::detail {

struct EffectiveB {
  bool active = false;    // false when K = 0 or every w_k vanishes
  bool constant = true;   // constant-in-space coefficients
  std::vector<double> b;  // constant case: the collapsed vector
  std::optional<VectorField> field;  // smooth case: the collapsed field
};

EffectiveB effective_b(const noise::QField& q, const std::vector<double>& w);

/// Noise term of the density equation: sum_k w_k div(rho Q_k), collapsed.
/// Constant coefficients avoid the product entirely (B . grad rho).
ScalarField continuity_noise(const ScalarField& rho, const EffectiveB& B);

/// Noise term of the momentum equation applied to q_full = rho u (dealiased
/// product), one component per axis, not yet Galerkin-projected.
VectorField momentum_noise(const VectorField& q_full, const EffectiveB& B);

/// Minimum of the padded collocation values of f on the factor*n grid —
/// the positivity the velocity solve actually sees.
double padded_min(const ScalarField& f, int factor = 2);

}  // namespace cnstn::solver::detail
