#include "cnstn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cnstn/csv.hpp"
#include "cnstn/spectral.hpp"
#include "scheme_detail.hpp"

namespace cnstn::diag {

using solver::GalerkinState;
using solver::SchemeParams;

namespace {

// Collocation quadrature of fn(f, g, h) on the factor*n padded grid; exact
// whenever fn is polynomial and the total band fits, spectrally accurate
// otherwise.
template <typename F>
double integrate_padded3(const ScalarField& f, const ScalarField& g, const ScalarField& h,
                         F&& fn, int factor) {
  const int np = factor * f.grid().points;
  ScalarField pf = spectral::pad(f, np);
  ScalarField pg = spectral::pad(g, np);
  ScalarField ph = spectral::pad(h, np);
  const auto& vf = pf.values();
  const auto& vg = pg.values();
  const auto& vh = ph.values();
  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < vf.size(); ++i) {
    double y = fn(vf[i], vg[i], vh[i]) - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return f.grid().volume() * acc / static_cast<double>(vf.size());
}

double positive_power(double x, double g) {
  if (x > 0.0) return std::pow(x, g);
  return 0.0;  // roundoff excursions of padded interpolants
}

}  // namespace

std::pair<double, double> energy(const GalerkinState& s) {
  VectorField q_full = spectral::multiply(s.rho, s.u);
  double kinetic = 0.5 * spectral::inner(q_full, s.u);
  double potential = spectral::integrate_pointwise_padded(
      s.rho, [&](double x) { return solver::pressure_potential_value(x, s.params); },
      s.params.quad_factor());
  return {kinetic, potential};
}

std::pair<double, std::vector<double>> mass_momentum(const GalerkinState& s) {
  double mass = spectral::integrate(s.rho);
  std::vector<double> mom(static_cast<std::size_t>(s.grid().dim), 0.0);
  for (int i = 0; i < s.grid().dim; ++i)
    mom[static_cast<std::size_t>(i)] = spectral::inner(s.rho, s.u[i]);
  return {mass, mom};
}

double dissipation_rate(const GalerkinState& s) {
  const int dim = s.grid().dim;
  const double mf = s.params.mu * s.params.stress_d_factor;

  std::vector<ScalarField> du;  // du[a*dim + b] = d_a u_b
  du.reserve(static_cast<std::size_t>(dim * dim));
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) du.push_back(spectral::derivative(s.u[b], a));

  double sym = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      ScalarField d = du[static_cast<std::size_t>(a * dim + b)] +
                      du[static_cast<std::size_t>(b * dim + a)];
      d *= 0.5;
      double nd = spectral::l2_norm(d);
      sym += nd * nd;
    }
  ScalarField div_u = spectral::divergence(s.u);
  double ndiv = spectral::l2_norm(div_u);
  return 2.0 * mf * sym + s.params.eta * ndiv * ndiv;
}

double eps_term_rate(const GalerkinState& s) {
  if (s.params.epsilon <= 0.0) return 0.0;
  const TorusGrid& g = s.grid();
  const int factor = s.params.quad_factor();
  const int np = factor * g.points;

  std::vector<ScalarField> grads;
  for (int a = 0; a < g.dim; ++a)
    grads.push_back(spectral::pad(spectral::derivative(s.rho, a), np));
  ScalarField rp = spectral::pad(s.rho, np);
  const auto& rv = rp.values();

  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < rv.size(); ++i) {
    double g2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double d = grads[static_cast<std::size_t>(a)].values()[i];
      g2 += d * d;
    }
    double y = solver::pressure_potential_second(rv[i], s.params) * g2 - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  double integral = g.volume() * acc / static_cast<double>(rv.size());
  return s.params.epsilon * integral;
}

double eps_cross_rate(const GalerkinState& s) {
  if (s.params.epsilon <= 0.0) return 0.0;
  const TorusGrid& g = s.grid();
  const int np = 2 * g.points;

  // eps int rho |grad u|^2, evaluated pointwise: manifestly nonnegative, and
  // the exact value of the two cross terms it stands for in the budget.
  ScalarField rp = spectral::pad(s.rho, np);
  std::vector<ScalarField> du;
  for (int a = 0; a < g.dim; ++a)
    for (int i = 0; i < g.dim; ++i)
      du.push_back(spectral::pad(spectral::derivative(s.u[i], a), np));

  const auto& rv = rp.values();
  double acc = 0.0, comp = 0.0;
  for (std::size_t j = 0; j < rv.size(); ++j) {
    double g2 = 0.0;
    for (const auto& d : du) {
      double v = d.values()[j];
      g2 += v * v;
    }
    double y = rv[j] * g2 - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  double integral = g.volume() * acc / static_cast<double>(rv.size());
  return s.params.epsilon * integral;
}

double noise_energy_input_rate(const GalerkinState& s, const noise::QField& q,
                               const std::vector<double>& w) {
  solver::detail::EffectiveB B = solver::detail::effective_b(q, w);
  if (!B.active) return 0.0;
  const TorusGrid& g = s.grid();
  const int qf = s.params.quad_factor();

  ScalarField n_c = solver::detail::continuity_noise(s.rho, B);

  // <P'(rho), N_c>
  double term1 = spectral::integrate_pointwise_padded(
      s.rho, n_c,
      [&](double r, double nc) { return solver::pressure_potential_prime(r, s.params) * nc; },
      qf);

  // -1/2 <N_c, |u|^2>, with |u|^2 formed exactly on the padded grid
  double term2;
  {
    const int np = 2 * g.points;
    ScalarField ncp = spectral::pad(n_c, np);
    std::vector<ScalarField> up;
    for (int i = 0; i < g.dim; ++i) up.push_back(spectral::pad(s.u[i], np));
    const auto& nv = ncp.values();
    double acc = 0.0, comp = 0.0;
    for (std::size_t j = 0; j < nv.size(); ++j) {
      double u2 = 0.0;
      for (const auto& ui : up) {
        double v = ui.values()[j];
        u2 += v * v;
      }
      double y = nv[j] * u2 - comp;
      double t = acc + y;
      comp = (t - acc) - y;
      acc = t;
    }
    term2 = -0.5 * g.volume() * acc / static_cast<double>(nv.size());
  }

  // <N_m, u>
  VectorField q_full = spectral::multiply(s.rho, s.u);
  VectorField n_m = solver::detail::momentum_noise(q_full, B);
  double term3 = spectral::inner(n_m, s.u);

  return term1 + term2 + term3;
}

double pressure_div_q_rate(const GalerkinState& s, const noise::QField& q,
                           const std::vector<double>& w) {
  solver::detail::EffectiveB B = solver::detail::effective_b(q, w);
  if (!B.active || B.constant) return 0.0;
  ScalarField div_b = spectral::divergence(*B.field);
  return spectral::integrate_pointwise_padded(
      s.rho, div_b,
      [&](double r, double d) { return solver::pressure_value(r, s.params) * d; },
      s.params.quad_factor());
}

std::vector<EnergyLedgerRow> energy_audit(const solver::Trajectory& traj) {
  std::vector<EnergyLedgerRow> rows;
  rows.reserve(traj.steps.size() + 1);

  EnergyLedgerRow r0;
  r0.t = traj.t0;
  r0.kinetic = traj.kinetic0;
  r0.potential = traj.potential0;
  rows.push_back(r0);

  const double dt = traj.params.dt;
  const double e0 = traj.kinetic0 + traj.potential0;
  double diss_prev = traj.dissipation_rate0;
  double epst_prev = traj.eps_term_rate0;
  double epsc_prev = traj.eps_cross_rate0;

  EnergyLedgerRow acc = r0;
  for (const auto& st : traj.steps) {
    acc.t = st.t;
    acc.kinetic = st.kinetic;
    acc.potential = st.potential;
    acc.dissipation_cum += 0.5 * dt * (diss_prev + st.dissipation_rate);
    acc.eps_term_cum += 0.5 * dt * (epst_prev + st.eps_term_rate);
    acc.eps_cross_cum += 0.5 * dt * (epsc_prev + st.eps_cross_rate);
    acc.noise_cum += st.noise_increment;
    acc.residual = (st.kinetic + st.potential) - e0 + acc.dissipation_cum + acc.eps_term_cum +
                   acc.eps_cross_cum + acc.noise_cum;
    diss_prev = st.dissipation_rate;
    epst_prev = st.eps_term_rate;
    epsc_prev = st.eps_cross_rate;
    rows.push_back(acc);
  }
  return rows;
}

void export_ledger_csv(const std::vector<EnergyLedgerRow>& rows, const std::string& filename) {
  csv::Table t;
  t.kind = "ledger";
  t.header = {"t",            "kinetic",      "potential",     "dissipation_cum",
              "eps_term_cum", "eps_cross_cum", "noise_cum",    "residual"};
  for (const auto& r : rows)
    t.rows.push_back({r.t, r.kinetic, r.potential, r.dissipation_cum, r.eps_term_cum,
                      r.eps_cross_cum, r.noise_cum, r.residual});
  csv::write_table(t, filename);
}

PressureWeight pressure_weight(const solver::Trajectory& traj, double theta_exp) {
  if (traj.states.empty()) throw std::invalid_argument("trajectory holds no snapshots");
  const auto& p = traj.params;
  const int dim = traj.states.front().grid().dim;

  PressureWeight out;
  out.theta = theta_exp;
  out.theta_limit = (2.0 / static_cast<double>(dim)) * p.gamma - 1.0;
  out.theta_admissible = theta_exp > 0.0 && theta_exp < out.theta_limit;

  std::vector<double> space(traj.states.size(), 0.0);
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    space[j] = spectral::integrate_pointwise_padded(
        traj.states[j].rho,
        [&](double x) { return solver::pressure_value(x, p) * positive_power(x, theta_exp); },
        4);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < traj.states.size(); ++j) {
    double h = traj.sample_times[j + 1] - traj.sample_times[j];
    acc += 0.5 * h * (space[j] + space[j + 1]);
  }
  out.value = acc;
  return out;
}

FluxPairSeries flux_pair(const solver::Trajectory& traj, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation level k must be positive");
  const auto& p = traj.params;
  const double c = p.eta + 2.0 * p.mu * p.stress_d_factor;

  FluxPairSeries out;
  out.k = k;
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    const auto& s = traj.states[j];
    ScalarField div_u = spectral::divergence(s.u);
    double v = spectral::integrate_pointwise_padded(
        s.rho, div_u,
        [&](double r, double d) {
          return (solver::pressure_value(r, p) - c * d) * solver::truncation(r, k);
        },
        p.quad_factor());
    out.t.push_back(traj.sample_times[j]);
    out.value.push_back(v);
  }
  return out;
}

double commutator_J5(const GalerkinState& s, const noise::QField& q) {
  const int dim = s.grid().dim;
  double acc = 0.0;
  for (int k = 0; k < q.K(); ++k) {
    const VectorField& Qk = q.field(k);
    for (int j = 0; j < dim; ++j) {
      ScalarField rho_q = spectral::multiply(s.rho, Qk[j]);
      for (int i = 0; i < dim; ++i) {
        ScalarField a = spectral::multiply(s.rho, spectral::riesz_double(rho_q, i, j));
        ScalarField b = spectral::multiply(rho_q, spectral::riesz_double(s.rho, i, j));
        acc += spectral::inner(s.u[i], a - b);
      }
    }
  }
  return acc;
}

double commutator_J5_scale(const GalerkinState& s, const noise::QField& q) {
  double u_l2 = spectral::l2_norm(s.u);
  double rho_l4 = std::pow(
      spectral::integrate_pointwise_padded(
          s.rho, [](double x) { return x * x * x * x; }, 3),
      0.25);
  double q_w1inf = 0.0;
  for (int k = 0; k < q.K(); ++k) {
    const VectorField& Qk = q.field(k);
    for (int j = 0; j < s.grid().dim; ++j) {
      q_w1inf = std::max(q_w1inf, std::max(std::abs(spectral::max_value(Qk[j])),
                                           std::abs(spectral::min_value(Qk[j]))));
      for (int a = 0; a < s.grid().dim; ++a) {
        ScalarField d = spectral::derivative(Qk[j], a);
        q_w1inf = std::max(q_w1inf, std::max(std::abs(spectral::max_value(d)),
                                             std::abs(spectral::min_value(d))));
      }
    }
  }
  return u_l2 * rho_l4 * rho_l4 * std::max(q_w1inf, 1e-300);
}

RhoLogRhoSeries rho_log_rho(const solver::Trajectory& traj, const noise::QField* q,
                            const noise::DriverPath* driver) {
  const auto& p = traj.params;
  const std::size_t M = traj.states.size();
  RhoLogRhoSeries out;
  out.t = traj.sample_times;
  out.value.resize(M, 0.0);
  out.residual.resize(M, 0.0);

  std::vector<double> transport(M, 0.0);  // int rho div u at sample times
  for (std::size_t j = 0; j < M; ++j) {
    const auto& s = traj.states[j];
    out.value[j] = spectral::integrate_pointwise_padded(
        s.rho, [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; }, p.quad_factor());
    transport[j] = spectral::inner(s.rho, spectral::divergence(s.u));
  }

  const bool with_noise = q != nullptr && driver != nullptr && q->K() > 0 &&
                          q->max_divergence() > 1e-12;
  std::vector<std::vector<double>> div_pairing;  // [sample][k] = int rho div Q_k
  if (with_noise) {
    div_pairing.assign(M, std::vector<double>(static_cast<std::size_t>(q->K()), 0.0));
    for (std::size_t j = 0; j < M; ++j)
      for (int k = 0; k < q->K(); ++k)
        div_pairing[j][static_cast<std::size_t>(k)] =
            spectral::inner(traj.states[j].rho, q->divergence(k));
  }

  // residual_j = value_j - value_0 + I_j + N_j with I, N as running sums
  double I = 0.0;
  double N = 0.0;
  for (std::size_t j = 1; j < M; ++j) {
    double h = traj.sample_times[j] - traj.sample_times[j - 1];
    I += 0.5 * h * (transport[j - 1] + transport[j]);
    if (with_noise) {
      auto za = driver->value_at(traj.sample_times[j - 1]);
      auto zb = driver->value_at(traj.sample_times[j]);
      for (int k = 0; k < q->K(); ++k) {
        double dz = zb[static_cast<std::size_t>(k)] - za[static_cast<std::size_t>(k)];
        N += dz * 0.5 *
             (div_pairing[j - 1][static_cast<std::size_t>(k)] +
              div_pairing[j][static_cast<std::size_t>(k)]);
      }
    }
    out.residual[j] = out.value[j] - out.value[0] + I + N;
  }
  return out;
}

ThetaSpec truncation_theta(double k) {
  ThetaSpec t;
  t.value = [k](double z) { return solver::truncation(z, k); };
  t.derivative = [k](double z) { return solver::truncation_prime(z, k); };
  t.derivative_compactly_supported = true;
  return t;
}

ThetaSpec identity_theta() {
  ThetaSpec t;
  t.value = [](double z) { return z; };
  t.derivative = [](double) { return 1.0; };
  t.derivative_compactly_supported = false;
  return t;
}

RenormSeries renorm_residual(const solver::Trajectory& traj, const ThetaSpec& theta,
                             const ScalarField& psi, const noise::QField* q,
                             const noise::DriverPath* driver) {
  const auto& p = traj.params;
  const std::size_t M = traj.states.size();
  if (M == 0) throw std::invalid_argument("trajectory holds no snapshots");
  const TorusGrid& g = traj.states.front().grid();
  const int qf = p.quad_factor();
  const int dim = g.dim;

  RenormSeries out;
  out.t = traj.sample_times;
  out.residual.resize(M, 0.0);
  out.theta_warning = !theta.derivative_compactly_supported;

  VectorField grad_psi = spectral::gradient(psi);

  const bool with_noise = q != nullptr && driver != nullptr && q->K() > 0;

  std::vector<double> tested(M, 0.0);   // <theta(rho), psi>
  std::vector<double> drift(M, 0.0);    // <theta(rho) u, grad psi> - <(theta' rho - theta) div u, psi>
  std::vector<std::vector<double>> noise_terms;  // [sample][k]
  if (with_noise)
    noise_terms.assign(M, std::vector<double>(static_cast<std::size_t>(q->K()), 0.0));

  for (std::size_t j = 0; j < M; ++j) {
    const auto& s = traj.states[j];
    tested[j] = spectral::integrate_pointwise_padded(
        s.rho, psi, [&](double r, double w) { return theta.value(r) * w; }, qf);

    double adv = 0.0;
    for (int i = 0; i < dim; ++i)
      adv += integrate_padded3(
          s.rho, s.u[i], grad_psi[i],
          [&](double r, double ui, double gp) { return theta.value(r) * ui * gp; }, qf);
    ScalarField div_u = spectral::divergence(s.u);
    double comp = integrate_padded3(
        s.rho, div_u, psi,
        [&](double r, double d, double w) {
          return (theta.derivative(r) * r - theta.value(r)) * d * w;
        },
        qf);
    drift[j] = adv - comp;

    if (with_noise) {
      for (int k = 0; k < q->K(); ++k) {
        double adv_k = 0.0;
        if (q->constant_in_space()) {
          const auto& v = q->vec(k);
          for (int i = 0; i < dim; ++i)
            adv_k += v[static_cast<std::size_t>(i)] *
                     spectral::integrate_pointwise_padded(
                         s.rho, grad_psi[i],
                         [&](double r, double gp) { return theta.value(r) * gp; }, qf);
        } else {
          const VectorField& Qk = q->field(k);
          for (int i = 0; i < dim; ++i)
            adv_k += integrate_padded3(
                s.rho, Qk[i], grad_psi[i],
                [&](double r, double qv, double gp) { return theta.value(r) * qv * gp; }, qf);
        }
        double comp_k = 0.0;
        if (!q->constant_in_space()) {
          ScalarField div_q = q->divergence(k);
          comp_k = integrate_padded3(
              s.rho, div_q, psi,
              [&](double r, double d, double w) {
                return (theta.derivative(r) * r - theta.value(r)) * d * w;
              },
              qf);
        }
        noise_terms[j][static_cast<std::size_t>(k)] = adv_k - comp_k;
      }
    }
  }

  double I = 0.0, N = 0.0;
  for (std::size_t j = 1; j < M; ++j) {
    double h = traj.sample_times[j] - traj.sample_times[j - 1];
    I += 0.5 * h * (drift[j - 1] + drift[j]);
    if (with_noise) {
      auto za = driver->value_at(traj.sample_times[j - 1]);
      auto zb = driver->value_at(traj.sample_times[j]);
      for (int k = 0; k < q->K(); ++k) {
        double dz = zb[static_cast<std::size_t>(k)] - za[static_cast<std::size_t>(k)];
        N += dz * 0.5 *
             (noise_terms[j - 1][static_cast<std::size_t>(k)] +
              noise_terms[j][static_cast<std::size_t>(k)]);
      }
    }
    out.residual[j] = (tested[j] - tested[0]) - I - N;
  }
  return out;
}

}  // namespace cnstn::diag
