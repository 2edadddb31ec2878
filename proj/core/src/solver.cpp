#include "cnstn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cnstn/diagnostics.hpp"
#include "cnstn/spectral.hpp"
#include "scheme_detail.hpp"

namespace cnstn::solver {

namespace detail {

EffectiveB effective_b(const noise::QField& q, const std::vector<double>& w) {
  EffectiveB B;
  if (q.K() == 0) return B;
  if (static_cast<int>(w.size()) != q.K())
    throw std::invalid_argument("driver slope dimension does not match the coefficient count");
  bool any = false;
  for (double wk : w) any = any || wk != 0.0;
  if (!any) return B;
  B.active = true;
  B.constant = q.constant_in_space();
  if (B.constant) {
    B.b.assign(static_cast<std::size_t>(q.grid().dim), 0.0);
    for (int k = 0; k < q.K(); ++k) {
      const auto& v = q.vec(k);
      for (std::size_t a = 0; a < B.b.size(); ++a) B.b[a] += w[static_cast<std::size_t>(k)] * v[a];
    }
  } else {
    VectorField f(q.grid());
    for (int k = 0; k < q.K(); ++k) f.add_scaled(q.field(k), w[static_cast<std::size_t>(k)]);
    B.field = std::move(f);
  }
  return B;
}

ScalarField continuity_noise(const ScalarField& rho, const EffectiveB& B) {
  if (!B.active) throw std::logic_error("continuity_noise called with inactive coefficient");
  if (B.constant) {
    ScalarField out(rho.grid());
    for (int a = 0; a < rho.grid().dim; ++a)
      out.add_scaled(spectral::derivative(rho, a), B.b[static_cast<std::size_t>(a)]);
    return out;
  }
  return spectral::divergence(spectral::multiply(rho, *B.field));
}

VectorField momentum_noise(const VectorField& q_full, const EffectiveB& B) {
  if (!B.active) throw std::logic_error("momentum_noise called with inactive coefficient");
  VectorField out(q_full.grid());
  const int dim = q_full.grid().dim;
  for (int i = 0; i < dim; ++i) {
    if (B.constant) {
      for (int a = 0; a < dim; ++a)
        out[i].add_scaled(spectral::derivative(q_full[i], a), B.b[static_cast<std::size_t>(a)]);
    } else {
      out[i] = spectral::divergence(spectral::multiply(q_full[i], *B.field));
    }
  }
  return out;
}

double padded_min(const ScalarField& f, int factor) {
  ScalarField pf = spectral::pad(f, factor * f.grid().points);
  const auto& v = pf.values();
  double mn = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (double x : v) {
    finite = finite && std::isfinite(x);
    mn = std::min(mn, x);
  }
  if (!finite) return std::numeric_limits<double>::quiet_NaN();
  return mn;
}

}  // namespace detail

// ------------------------------------------------------------- parameters --

void SchemeParams::validate(int dim) const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("spatial dimension must be 1, 2 or 3");
  if (!(gamma > 0.5 * dim)) throw std::invalid_argument("gamma must exceed N/2");
  if (!(beta > std::max(4.0, gamma)))
    throw std::invalid_argument("beta must exceed max{4, gamma}");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  if (!(stress_d_factor > 0.0)) throw std::invalid_argument("stress_d_factor must be positive");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
}

int SchemeParams::quad_factor() const {
  double deg = gamma;
  if (delta > 0.0) deg = std::max(deg, beta);
  int d = static_cast<int>(std::ceil(deg - 1e-12));
  // integration of a degree-d power of a band-limited field is alias-free on
  // an N-grid once N > (d+1)(n/2 - 1); factor = ceil((d+1)/2) guarantees it.
  int f = std::max(2, (d + 2) / 2);
  return std::clamp(f, 2, 4);
}

// ----------------------------------------------------------- pressure law --

namespace {

// pow with a roundoff guard: padded interpolants of positive fields can dip
// a few ulps below zero between collocation points; those are evaluated as
// zero, while genuinely negative arguments are the caller's error to raise.
double power_law(double x, double g, double neg_tol) {
  if (x > 0.0) return std::pow(x, g);
  if (x >= -neg_tol) return 0.0;
  return std::numeric_limits<double>::quiet_NaN();
}

double negative_tolerance(const ScalarField& rho) {
  double scale = std::max(1.0, std::abs(rho.mean()));
  return 1e-12 * scale;
}

void require_not_genuinely_negative(const ScalarField& rho, const SchemeParams& p,
                                    const char* what) {
  double mn = detail::padded_min(rho, p.quad_factor());
  double tol = negative_tolerance(rho);
  if (!(mn >= -tol)) {
    std::ostringstream msg;
    msg << what << ": density minimum " << mn << " is negative";
    throw BlowUp(std::numeric_limits<double>::quiet_NaN(), mn, msg.str());
  }
}

}  // namespace

double pressure_value(double rho, const SchemeParams& p) {
  double tol = 1e-12;
  return p.a * power_law(rho, p.gamma, tol) + p.delta * power_law(rho, p.beta, tol);
}

double pressure_potential_value(double rho, const SchemeParams& p) {
  double tol = 1e-12;
  return p.a / (p.gamma - 1.0) * power_law(rho, p.gamma, tol) +
         (p.delta > 0.0 ? p.delta / (p.beta - 1.0) * power_law(rho, p.beta, tol) : 0.0);
}

double pressure_potential_prime(double rho, const SchemeParams& p) {
  double tol = 1e-12;
  return p.a * p.gamma / (p.gamma - 1.0) * power_law(rho, p.gamma - 1.0, tol) +
         (p.delta > 0.0 ? p.delta * p.beta / (p.beta - 1.0) * power_law(rho, p.beta - 1.0, tol)
                        : 0.0);
}

double pressure_potential_second(double rho, const SchemeParams& p) {
  double tol = 1e-12;
  return p.a * p.gamma * power_law(rho, p.gamma - 2.0, tol) +
         (p.delta > 0.0 ? p.delta * p.beta * power_law(rho, p.beta - 2.0, tol) : 0.0);
}

ScalarField pressure(const ScalarField& rho, const SchemeParams& p) {
  require_not_genuinely_negative(rho, p, "pressure");
  double tol = negative_tolerance(rho);
  return spectral::map_pointwise_padded(
      rho,
      [&](double x) {
        return p.a * power_law(x, p.gamma, tol) + p.delta * power_law(x, p.beta, tol);
      },
      p.quad_factor());
}

ScalarField pressure_potential(const ScalarField& rho, const SchemeParams& p) {
  require_not_genuinely_negative(rho, p, "pressure_potential");
  double tol = negative_tolerance(rho);
  return spectral::map_pointwise_padded(
      rho,
      [&](double x) {
        return p.a / (p.gamma - 1.0) * power_law(x, p.gamma, tol) +
               (p.delta > 0.0 ? p.delta / (p.beta - 1.0) * power_law(x, p.beta, tol) : 0.0);
      },
      p.quad_factor());
}

// --------------------------------------------------------------- stress ----

VectorField stress_divergence(const VectorField& u, const SchemeParams& p) {
  const double mf = p.mu * p.stress_d_factor;
  VectorField out(u.grid());
  ScalarField div_u = spectral::divergence(u);
  VectorField grad_div = spectral::gradient(div_u);
  for (int i = 0; i < u.grid().dim; ++i) {
    out[i] = spectral::laplacian(u[i]) * mf;
    out[i].add_scaled(grad_div[i], mf + p.eta);
  }
  return out;
}

// ------------------------------------------------------------ truncation --

double truncation(double z, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation level k must be positive");
  double s = z / k;
  if (s <= 1.0) return z;
  if (s >= 3.0) return 2.0 * k;
  double r = s - 1.0;
  return k * (1.0 + r - 0.25 * r * r);
}

double truncation_prime(double z, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation level k must be positive");
  double s = z / k;
  if (s <= 1.0) return 1.0;
  if (s >= 3.0) return 0.0;
  return 1.0 - 0.5 * (s - 1.0);
}

// ---------------------------------------------------------- instantaneous --

namespace {

// The explicit right-hand sides of one stage, with the noise split out so the
// stepper can record deterministic and stochastic update parts separately.
struct StageRhs {
  ScalarField g_drift;                  // -div(rho u); the eps term is implicit
  std::optional<ScalarField> g_noise;   // sum_k w_k div(rho Q_k)
  VectorField f_drift;                  // P_m of transport + pressure + stress + eps
  std::optional<VectorField> f_noise;   // P_m of sum_k w_k div(rho u Q_k)
};

StageRhs stage_rhs(const ScalarField& rho, const VectorField& u, const SchemeParams& p,
                   const detail::EffectiveB& B) {
  const TorusGrid& g = rho.grid();
  const int dim = g.dim;
  VectorField q_full = spectral::multiply(rho, u);

  StageRhs out{ScalarField(g), std::nullopt, VectorField(g), std::nullopt};
  out.g_drift = spectral::divergence(q_full) * (-1.0);

  VectorField f(g);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j)
      f[i] -= spectral::derivative(spectral::multiply(q_full[i], u[j]), j);
  }
  VectorField grad_p = spectral::gradient(pressure(rho, p));
  VectorField stress = stress_divergence(u, p);
  for (int i = 0; i < dim; ++i) {
    f[i] -= grad_p[i];
    f[i] += stress[i];
    if (p.epsilon > 0.0) f[i].add_scaled(spectral::laplacian(q_full[i]), p.epsilon);
  }
  out.f_drift = spectral::project_modes(f, p.m);

  if (B.active) {
    out.g_noise = detail::continuity_noise(rho, B);
    out.f_noise = spectral::project_modes(detail::momentum_noise(q_full, B), p.m);
  }
  return out;
}

// Apply the coefficient-wise division by (1 + c |k|^2) in place.
void imex_divide(ScalarField& f, double c) {
  if (c == 0.0) return;
  const TorusGrid& g = f.grid();
  auto& cf = f.coeffs_mut();
  for (std::size_t i = 0; i < cf.size(); ++i) {
    auto k = g.wavevector(i);
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) k2 += static_cast<double>(k[a]) * k[a];
    cf[i] /= 1.0 + c * k2;
  }
}

void check_floor(const ScalarField& rho, double floor, double t, const char* where) {
  double mn = detail::padded_min(rho, 2);
  if (!(mn > floor)) {
    std::ostringstream msg;
    msg << where << ": density minimum " << mn << " at t = " << t
        << " reached the floor " << floor;
    throw BlowUp(t, mn, msg.str());
  }
}

}  // namespace

ScalarField rhs_continuity(const GalerkinState& s, const noise::QField& q,
                           const std::vector<double>& w) {
  detail::EffectiveB B = detail::effective_b(q, w);
  VectorField q_full = spectral::multiply(s.rho, s.u);
  ScalarField out = spectral::divergence(q_full) * (-1.0);
  if (s.params.epsilon > 0.0)
    out.add_scaled(spectral::laplacian(s.rho), s.params.epsilon);
  if (B.active) out += detail::continuity_noise(s.rho, B);
  return out;
}

VectorField rhs_momentum(const GalerkinState& s, const noise::QField& q,
                         const std::vector<double>& w) {
  detail::EffectiveB B = detail::effective_b(q, w);
  StageRhs r = stage_rhs(s.rho, s.u, s.params, B);
  VectorField out = std::move(r.f_drift);
  if (r.f_noise) out += *r.f_noise;
  return out;
}

// --------------------------------------------------------- velocity solve --

VectorField solve_velocity(const ScalarField& rho, const VectorField& q_target, int m,
                           const VectorField* warm_start) {
  const TorusGrid& g = rho.grid();
  const int dim = g.dim;
  const int n2 = 2 * g.points;

  ScalarField rho_pad = spectral::pad(rho, n2);
  const std::vector<double>& rv = rho_pad.values();
  {
    double mn = std::numeric_limits<double>::infinity();
    for (double x : rv) mn = std::min(mn, x);
    if (!(mn > 0.0))
      throw BlowUp(std::numeric_limits<double>::quiet_NaN(), mn,
                   "velocity solve: density is not positive, the mass operator "
                   "is no longer definite");
  }

  auto apply = [&](const VectorField& v) {
    VectorField out(g);
    for (int i = 0; i < dim; ++i) {
      ScalarField vi = spectral::pad(v[i], n2);
      auto& vals = vi.values_mut();
      for (std::size_t j = 0; j < vals.size(); ++j) vals[j] *= rv[j];
      out[i] = spectral::project_modes(spectral::truncate_to(vi, g.points), m);
    }
    return out;
  };

  VectorField b = spectral::project_modes(q_target, m);
  const double b_norm = spectral::l2_norm(b);
  if (b_norm == 0.0) return VectorField(g);

  VectorField x = warm_start ? spectral::project_modes(*warm_start, m) : VectorField(g);
  VectorField r = b;
  r -= apply(x);
  VectorField p = r;
  double rs = spectral::inner(r, r);

  const double target = 1e-14 * b_norm;
  const int max_iter = 400;
  double best = std::sqrt(rs);
  int since_best = 0;
  for (int it = 0; it < max_iter && std::sqrt(rs) > target; ++it) {
    VectorField Ap = apply(p);
    double pAp = spectral::inner(p, Ap);
    if (!(pAp > 0.0))
      throw BlowUp(std::numeric_limits<double>::quiet_NaN(), 0.0,
                   "velocity solve: mass operator lost positive definiteness");
    double alpha = rs / pAp;
    x.add_scaled(p, alpha);
    r.add_scaled(Ap, -alpha);
    double rs_new = spectral::inner(r, r);
    double res = std::sqrt(rs_new);
    if (res < best) {
      best = res;
      since_best = 0;
    } else if (++since_best > 25) {
      break;  // stagnated at roundoff level
    }
    double beta = rs_new / rs;
    rs = rs_new;
    VectorField p_next = r;
    p_next.add_scaled(p, beta);
    p = std::move(p_next);
  }

  // recompute the true residual; CG recursion drift must not hide a failure
  VectorField res_vec = b;
  res_vec -= apply(x);
  double res = spectral::l2_norm(res_vec);
  if (res > 1e-10 * b_norm) {
    std::ostringstream msg;
    msg << "velocity solve: conjugate gradients stalled at relative residual "
        << res / b_norm;
    throw BlowUp(std::numeric_limits<double>::quiet_NaN(), 0.0, msg.str());
  }
  return x;
}

double cfl_number(const GalerkinState& s) {
  const TorusGrid& g = s.grid();
  const auto& p = s.params;
  const int half = g.points / 2;

  const auto& rv = s.rho.values();
  double rho_max = 0.0;
  for (double x : rv) rho_max = std::max(rho_max, x);
  double u_max = 0.0;
  const std::size_t sz = g.size();
  for (std::size_t j = 0; j < sz; ++j) {
    double norm2 = 0.0;
    for (int i = 0; i < g.dim; ++i) {
      double v = s.u[i].values()[j];
      norm2 += v * v;
    }
    u_max = std::max(u_max, std::sqrt(norm2));
  }
  double dp = p.a * p.gamma * std::pow(std::max(rho_max, 0.0), p.gamma - 1.0);
  if (p.delta > 0.0) dp += p.delta * p.beta * std::pow(std::max(rho_max, 0.0), p.beta - 1.0);
  double sound = std::sqrt(std::max(dp, 0.0));
  double visc = (2.0 * p.mu * p.stress_d_factor + p.eta) * static_cast<double>(p.m) * p.m;
  return p.dt * (u_max * half + sound * half + visc);
}

// ------------------------------------------------------------ initial data --

ScalarField prepare_density(const ScalarField& rho0, int m, double positivity_target) {
  ScalarField rho = spectral::project_modes(rho0, m);
  double mn = detail::padded_min(rho, 2);
  if (!std::isfinite(mn)) throw std::invalid_argument("initial density is not finite");
  if (mn >= positivity_target) return rho;

  const double vol = rho.grid().volume();
  const double mass0 = spectral::integrate(rho);
  const double c = positivity_target - mn;
  ScalarField lifted = rho;
  lifted.coeffs_mut()[0] += c;
  const double scale = mass0 / (mass0 + c * vol);
  if (!(scale > 0.0))
    throw std::invalid_argument("initial density cannot be lifted to the positivity target "
                                "without destroying its mass");
  lifted *= scale;
  return lifted;
}

VectorField prepare_velocity(const VectorField& u0, int m) {
  return spectral::project_modes(u0, m);
}

// ------------------------------------------------------------- observables --

ModeBlock::ModeBlock(int dim_, int cutoff_) : dim(dim_), cutoff(cutoff_) {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(side());
  c.assign(n, {0.0, 0.0});
}

namespace {

std::size_t block_index(const ModeBlock& b, const std::array<int, 3>& k) {
  std::size_t flat = 0;
  for (int a = 0; a < b.dim; ++a) {
    if (std::abs(k[static_cast<std::size_t>(a)]) > b.cutoff)
      throw std::out_of_range("mode outside the observable window");
    flat = flat * static_cast<std::size_t>(b.side()) +
           static_cast<std::size_t>(k[static_cast<std::size_t>(a)] + b.cutoff);
  }
  for (int a = b.dim; a < 3; ++a)
    if (k[static_cast<std::size_t>(a)] != 0)
      throw std::out_of_range("mode outside the observable window");
  return flat;
}

template <typename Fn>
void for_window(int dim, int cutoff, Fn&& fn) {
  std::array<int, 3> k{0, 0, 0};
  const int lo = -cutoff, hi = cutoff;
  const int lo1 = dim > 1 ? lo : 0, hi1 = dim > 1 ? hi : 0;
  const int lo2 = dim > 2 ? lo : 0, hi2 = dim > 2 ? hi : 0;
  for (k[0] = lo; k[0] <= hi; ++k[0])
    for (k[1] = lo1; k[1] <= hi1; ++k[1])
      for (k[2] = lo2; k[2] <= hi2; ++k[2]) fn(k);
}

}  // namespace

ModeBlock ModeBlock::from_field(const ScalarField& f, int cutoff) {
  const TorusGrid& g = f.grid();
  if (cutoff > g.points / 2 - 1)
    throw std::invalid_argument("observable window exceeds the resolvable band");
  ModeBlock b(g.dim, cutoff);
  for_window(g.dim, cutoff, [&](const std::array<int, 3>& k) { b.at(k) = f.coeff(k); });
  return b;
}

std::complex<double> ModeBlock::at(const std::array<int, 3>& k) const {
  return c[block_index(*this, k)];
}

std::complex<double>& ModeBlock::at(const std::array<int, 3>& k) {
  return c[block_index(*this, k)];
}

ModeBlock& ModeBlock::add_scaled(const ModeBlock& o, double s) {
  if (o.c.size() != c.size()) throw std::invalid_argument("window size mismatch");
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += s * o.c[i];
  return *this;
}

double block_inner(const ModeBlock& f, const ModeBlock& g, double volume) {
  if (f.c.size() != g.c.size()) throw std::invalid_argument("window size mismatch");
  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < f.c.size(); ++i) {
    double y = (std::conj(g.c[i]) * f.c[i]).real() - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return volume * acc;
}

// -------------------------------------------------------------- time loop --

namespace {

// One Heun / IMEX step acting on (rho, u, q_m = P_m(rho u)).  The carried
// momentum makes the recorded update blocks telescope exactly: the new q_m
// is the old one plus the recorded increments, with no re-projection noise.
struct Stepper {
  const SchemeParams& p;
  const noise::QField& q;
  const noise::DriverPath& driver;
  double floor;
  int block_cutoff;  // < 0: no records

  void advance(double t, ScalarField& rho, VectorField& u, VectorField& q_m,
               StepRecord* rec) const {
    const TorusGrid& g = rho.grid();
    const double dt = p.dt;
    const double t_new = t + dt;

    std::vector<double> w;
    if (q.K() > 0) w = driver.slope_at(t + 0.5 * dt);
    detail::EffectiveB B = detail::effective_b(q, w);

    check_floor(rho, floor, t, "time step");

    // predictor: backward Euler in eps, explicit in everything else
    StageRhs s1 = stage_rhs(rho, u, p, B);
    ScalarField g1 = s1.g_drift;
    if (s1.g_noise) g1 += *s1.g_noise;
    ScalarField rho_star = rho;
    rho_star.add_scaled(g1, dt);
    imex_divide(rho_star, p.epsilon * dt);
    check_floor(rho_star, floor, t_new, "predictor");

    VectorField f1 = s1.f_drift;
    if (s1.f_noise) f1 += *s1.f_noise;
    VectorField q_star = q_m;
    q_star.add_scaled(f1, dt);
    VectorField u_star = solve_with_time(rho_star, q_star, t_new, &u);

    // corrector: trapezoid of the explicit terms, Crank-Nicolson in eps
    StageRhs s2 = stage_rhs(rho_star, u_star, p, B);
    ScalarField g_sum = s1.g_drift + s2.g_drift;
    if (s1.g_noise) g_sum += *s1.g_noise + *s2.g_noise;
    // build dt/2 (G1 + G2) + dt eps lap(rho_n), then apply the implicit divisor
    ScalarField incr = g_sum * (0.5 * dt);
    if (p.epsilon > 0.0) incr.add_scaled(spectral::laplacian(rho), p.epsilon * dt);
    imex_divide(incr, 0.5 * p.epsilon * dt);
    ScalarField rho_new = rho + incr;
    check_floor(rho_new, floor, t_new, "corrector");

    VectorField f_sum_det = s1.f_drift + s2.f_drift;
    VectorField q_new = q_m;
    q_new.add_scaled(f_sum_det, 0.5 * dt);
    std::optional<VectorField> mom_noise_incr;
    if (s1.f_noise) {
      VectorField ns = *s1.f_noise + *s2.f_noise;
      ns *= 0.5 * dt;
      q_new += ns;
      mom_noise_incr = std::move(ns);
    }
    VectorField u_new = solve_with_time(rho_new, q_new, t_new, &u_star);

    if (rec != nullptr) {
      rec->t = t_new;
      rec->dW.assign(static_cast<std::size_t>(q.K()), 0.0);
      if (q.K() > 0) {
        auto za = driver.value_at(t);
        auto zb = driver.value_at(t_new);
        for (int k = 0; k < q.K(); ++k)
          rec->dW[static_cast<std::size_t>(k)] =
              zb[static_cast<std::size_t>(k)] - za[static_cast<std::size_t>(k)];
      }

      // window of the realized density update, split drift / noise
      ScalarField cont_noise_f(g);
      if (s1.g_noise) {
        cont_noise_f = (*s1.g_noise + *s2.g_noise) * (0.5 * dt);
        imex_divide(cont_noise_f, 0.5 * p.epsilon * dt);
      }
      ScalarField cont_drift_f = incr - cont_noise_f;
      rec->cont_drift = ModeBlock::from_field(cont_drift_f, block_cutoff);
      rec->cont_noise = ModeBlock::from_field(cont_noise_f, block_cutoff);

      rec->mom_drift.clear();
      rec->mom_noise.clear();
      for (int i = 0; i < g.dim; ++i) {
        ScalarField d = f_sum_det[i] * (0.5 * dt);
        rec->mom_drift.push_back(ModeBlock::from_field(d, block_cutoff));
        if (mom_noise_incr) {
          rec->mom_noise.push_back(ModeBlock::from_field((*mom_noise_incr)[i], block_cutoff));
        } else {
          rec->mom_noise.push_back(ModeBlock(g.dim, block_cutoff));
        }
      }

      rec->rho_block = ModeBlock::from_field(rho_new, block_cutoff);
      rec->q_block.clear();
      for (int i = 0; i < g.dim; ++i)
        rec->q_block.push_back(ModeBlock::from_field(q_new[i], block_cutoff));

      GalerkinState end_state(g, p);
      end_state.t = t_new;
      end_state.rho = rho_new;
      end_state.u = u_new;

      rec->mass = spectral::integrate(rho_new);
      rec->kinetic = 0.5 * spectral::inner(q_new, u_new);
      rec->potential = spectral::integrate_pointwise_padded(
          rho_new, [&](double x) { return pressure_potential_value(x, p); }, p.quad_factor());
      rec->dissipation_rate = diag::dissipation_rate(end_state);
      rec->eps_term_rate = diag::eps_term_rate(end_state);
      rec->eps_cross_rate = diag::eps_cross_rate(end_state);

      if (B.active) {
        GalerkinState start_state(g, p);
        start_state.t = t;
        start_state.rho = rho;
        start_state.u = u;
        double in0 = diag::noise_energy_input_rate(start_state, q, w);
        double in1 = diag::noise_energy_input_rate(end_state, q, w);
        rec->noise_increment = -0.5 * dt * (in0 + in1);
        double pd0 = diag::pressure_div_q_rate(start_state, q, w);
        double pd1 = diag::pressure_div_q_rate(end_state, q, w);
        rec->pressure_div_q_increment = 0.5 * dt * (pd0 + pd1);
      } else {
        rec->noise_increment = 0.0;
        rec->pressure_div_q_increment = 0.0;
      }
    }

    rho = std::move(rho_new);
    u = std::move(u_new);
    q_m = std::move(q_new);
  }

  VectorField solve_with_time(const ScalarField& rho, const VectorField& q_target, double t,
                              const VectorField* warm) const {
    try {
      return solve_velocity(rho, q_target, p.m, warm);
    } catch (const BlowUp& b) {
      if (std::isnan(b.t)) throw BlowUp(t, b.min_rho, b.what());
      throw;
    }
  }
};

double resolve_floor(const SchemeParams& p, const ScalarField& rho) {
  if (p.density_floor > 0.0) return p.density_floor;
  return 1e-8 * rho.mean();
}

}  // namespace

GalerkinState step(const GalerkinState& s, const noise::QField& q,
                   const noise::DriverPath& driver) {
  s.params.validate(s.grid().dim);
  Stepper st{s.params, q, driver, resolve_floor(s.params, s.rho), -1};
  GalerkinState out = s;
  VectorField q_m = spectral::project_modes(spectral::multiply(out.rho, out.u), s.params.m);
  st.advance(out.t, out.rho, out.u, q_m, nullptr);
  out.t += s.params.dt;
  return out;
}

Trajectory run(const ScalarField& rho0, const VectorField& u0, const SchemeParams& params,
               const noise::QField& q, const noise::DriverPath& driver,
               const RunOptions& opts) {
  const TorusGrid& g = rho0.grid();
  params.validate(g.dim);
  if (g.points < 2 * params.m + 2)
    throw std::invalid_argument("grid resolution must exceed twice the Galerkin cutoff");

  const double steps_real = params.T / params.dt;
  const int n_steps = static_cast<int>(std::llround(steps_real));
  if (n_steps < 1 ||
      std::abs(static_cast<double>(n_steps) * params.dt - params.T) >
          1e-8 * std::max(params.T, 1.0))
    throw std::invalid_argument("dt must divide T");

  if (q.K() > 0) {
    driver.validate();
    if (driver.K() != q.K())
      throw std::invalid_argument("driver component count does not match the coefficients");
    if (driver.T() < params.T - 1e-12 * std::max(params.T, 1.0))
      throw std::invalid_argument("driver path is shorter than the run horizon");
  }

  double target = opts.positivity_target;
  if (target < 0.0) target = 0.05 * rho0.mean();

  ScalarField rho = prepare_density(rho0, params.m, target);
  VectorField u = prepare_velocity(u0, params.m);
  VectorField q_m = spectral::project_modes(spectral::multiply(rho, u), params.m);

  SchemeParams resolved = params;
  resolved.density_floor = resolve_floor(params, rho);

  Trajectory traj;
  traj.params = resolved;
  traj.K = q.K();
  traj.block_cutoff = opts.block_cutoff;
  traj.t0 = 0.0;

  {
    GalerkinState s0(g, resolved);
    s0.rho = rho;
    s0.u = u;
    traj.mass0 = spectral::integrate(rho);
    traj.kinetic0 = 0.5 * spectral::inner(q_m, u);
    traj.potential0 = spectral::integrate_pointwise_padded(
        rho, [&](double x) { return pressure_potential_value(x, resolved); },
        resolved.quad_factor());
    traj.dissipation_rate0 = diag::dissipation_rate(s0);
    traj.eps_term_rate0 = diag::eps_term_rate(s0);
    traj.eps_cross_rate0 = diag::eps_cross_rate(s0);
    traj.rho_block0 = ModeBlock::from_field(rho, opts.block_cutoff);
    for (int i = 0; i < g.dim; ++i)
      traj.q_block0.push_back(ModeBlock::from_field(q_m[i], opts.block_cutoff));
  }

  const int stride = std::max(1, opts.stride);
  auto snapshot = [&](double t) {
    GalerkinState s(g, resolved);
    s.t = t;
    s.rho = rho;
    s.u = u;
    s.rho.compact();
    s.u.compact();
    traj.sample_times.push_back(t);
    traj.states.push_back(std::move(s));
  };
  snapshot(0.0);

  Stepper st{resolved, q, driver, resolved.density_floor, opts.block_cutoff};
  for (int i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i) * resolved.dt;
    StepRecord rec;
    try {
      st.advance(t, rho, u, q_m, &rec);
    } catch (const BlowUp& b) {
      traj.blew_up = true;
      traj.blowup_time = b.t;
      traj.blowup_min_rho = b.min_rho;
      break;
    }
    traj.steps.push_back(std::move(rec));
    if ((i + 1) % stride == 0 || i + 1 == n_steps)
      snapshot(static_cast<double>(i + 1) * resolved.dt);
  }
  return traj;
}

}  // namespace cnstn::solver
