#include "cnstn/stratonovich.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cnstn/spectral.hpp"

namespace cnstn::strat {

using solver::ModeBlock;

namespace {

void check_alignment(const std::vector<double>& f, const noise::DriverPath& path,
                     int component) {
  if (f.size() != path.times.size())
    throw std::invalid_argument(
        "integrand samples and driver nodes live on different grids");
  if (component < 0 || component >= path.K())
    throw std::invalid_argument("driver component out of range");
}

}  // namespace

IntegralResult ito_integral(const std::vector<double>& f, const noise::DriverPath& path,
                            int component) {
  check_alignment(f, path, component);
  const std::size_t c = static_cast<std::size_t>(component);
  IntegralResult out;
  out.scheme = IntegralResult::Scheme::LeftPoint;
  out.segments = path.segments();
  double acc = 0.0, comp = 0.0;
  for (int i = 0; i < path.segments(); ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    double dz = path.values[si + 1][c] - path.values[si][c];
    double y = f[si] * dz - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  out.value = acc;
  return out;
}

IntegralResult stratonovich_integral(const std::vector<double>& f,
                                     const noise::DriverPath& path, int component) {
  check_alignment(f, path, component);
  const std::size_t c = static_cast<std::size_t>(component);
  IntegralResult out;
  out.scheme = IntegralResult::Scheme::Midpoint;
  out.segments = path.segments();
  double acc = 0.0, comp = 0.0;
  for (int i = 0; i < path.segments(); ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    double dz = path.values[si + 1][c] - path.values[si][c];
    double y = 0.5 * (f[si] + f[si + 1]) * dz - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  out.value = acc;
  return out;
}

ScalarField correction_operator(const ScalarField& rho, const noise::QField& q) {
  if (!q.constant_in_space())
    throw std::invalid_argument(
        "the closed-form correction multiplier requires constant coefficients");
  const TorusGrid& g = rho.grid();
  ScalarField out = rho;
  auto& c = out.coeffs_mut();
  const int half = g.points / 2;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto kv = g.wavevector(i);
    bool nyquist = false;
    for (int a = 0; a < g.dim; ++a) nyquist = nyquist || kv[static_cast<std::size_t>(a)] == half;
    if (nyquist) {
      c[i] = 0.0;
      continue;
    }
    double mult = 0.0;
    for (int k = 0; k < q.K(); ++k) {
      const auto& v = q.vec(k);
      double dot = 0.0;
      for (int a = 0; a < g.dim; ++a)
        dot += v[static_cast<std::size_t>(a)] * static_cast<double>(kv[static_cast<std::size_t>(a)]);
      mult += dot * dot;
    }
    c[i] *= -0.5 * mult;
  }
  return out;
}

namespace {

struct GapParts {
  double gap = 0.0;
  double magnitude = 0.0;  // |S| + |I| + |C|
};

// Window blocks of Q_k . grad psi for constant coefficients:
// (Q_k . grad psi)_kappa = i (Q_k . kappa) psi_kappa.
std::vector<ModeBlock> tested_gradients(const noise::QField& q, const ScalarField& psi,
                                        int cutoff) {
  const TorusGrid& g = psi.grid();
  // psi must be resolvable from the recorded window
  double max_abs = 0.0;
  const auto& pc = psi.coeffs();
  for (const auto& z : pc) max_abs = std::max(max_abs, std::abs(z));
  for (std::size_t i = 0; i < pc.size(); ++i) {
    auto kv = g.wavevector(i);
    int band = TorusGrid::band(kv);
    if (band > cutoff && std::abs(pc[i]) > 1e-12 * max_abs)
      throw std::invalid_argument("psi must live inside the recorded observable window");
  }

  std::vector<ModeBlock> out;
  for (int k = 0; k < q.K(); ++k) {
    const auto& v = q.vec(k);
    ModeBlock b(g.dim, cutoff);
    std::array<int, 3> kap{0, 0, 0};
    const int lo1 = g.dim > 1 ? -cutoff : 0, hi1 = g.dim > 1 ? cutoff : 0;
    const int lo2 = g.dim > 2 ? -cutoff : 0, hi2 = g.dim > 2 ? cutoff : 0;
    for (kap[0] = -cutoff; kap[0] <= cutoff; ++kap[0])
      for (kap[1] = lo1; kap[1] <= hi1; ++kap[1])
        for (kap[2] = lo2; kap[2] <= hi2; ++kap[2]) {
          double dot = 0.0;
          for (int a = 0; a < g.dim; ++a)
            dot += v[static_cast<std::size_t>(a)] * static_cast<double>(kap[static_cast<std::size_t>(a)]);
          b.at(kap) = std::complex<double>(0.0, dot) * psi.coeff(kap);
        }
    out.push_back(std::move(b));
  }
  return out;
}

GapParts correction_gap_parts(const solver::Trajectory& traj, const noise::QField& q,
                              const ScalarField& psi) {
  if (!q.constant_in_space())
    throw std::invalid_argument(
        "the covariation identity check requires constant coefficients");
  if (traj.states.empty()) throw std::invalid_argument("trajectory holds no snapshots");
  const TorusGrid& g = traj.states.front().grid();
  const double vol = g.volume();
  const int cutoff = traj.block_cutoff;
  const int n_steps = traj.steps_taken();

  std::vector<ModeBlock> gk = tested_gradients(q, psi, cutoff);

  double S = 0.0, I = 0.0, C = 0.0;
  for (int k = 0; k < q.K(); ++k) {
    const std::size_t sk = static_cast<std::size_t>(k);
    double f_prev = solver::block_inner(traj.rho_block0, gk[sk], vol);
    for (int i = 0; i < n_steps; ++i) {
      const auto& st = traj.steps[static_cast<std::size_t>(i)];
      double f_next = solver::block_inner(st.rho_block, gk[sk], vol);
      double gki = solver::block_inner(st.cont_noise, gk[sk], vol);
      double dw = st.dW[sk];
      I += f_prev * dw;
      S += 0.5 * (f_prev + f_next) * dw;
      C += 0.5 * gki * dw;
      f_prev = f_next;
    }
  }
  GapParts out;
  out.gap = S - I - C;
  out.magnitude = std::abs(S) + std::abs(I) + std::abs(C);
  return out;
}

}  // namespace

double correction_gap(const solver::Trajectory& traj, const noise::QField& q,
                      const ScalarField& psi) {
  return correction_gap_parts(traj, q, psi).gap;
}

GapSample correction_gap_sample(const solver::Trajectory& traj, const noise::QField& q,
                                const ScalarField& psi) {
  GapParts p = correction_gap_parts(traj, q, psi);
  return GapSample{p.gap, p.magnitude};
}

CorrectionStats correction_stats(const std::vector<double>& gaps, double dt, double scale) {
  CorrectionStats out;
  out.n_paths = static_cast<int>(gaps.size());
  out.dt = dt;
  out.scale = scale;
  if (gaps.empty()) {
    out.degenerate = true;
    out.verdict = CorrectionStats::Verdict::Fail;
    return out;
  }
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  if (gaps.size() > 1) var /= static_cast<double>(gaps.size() - 1);
  double sd = std::sqrt(var);
  out.mean = mean;
  out.stderr_mean = sd / std::sqrt(static_cast<double>(gaps.size()));
  out.degenerate = gaps.size() < 2 || (sd == 0.0 && mean != 0.0);

  if (out.stderr_mean > 0.0) {
    double z = std::abs(mean) / out.stderr_mean;
    out.verdict = z <= 3.0 ? CorrectionStats::Verdict::Pass
                           : (z <= 5.0 ? CorrectionStats::Verdict::Warn
                                       : CorrectionStats::Verdict::Fail);
  } else {
    // zero spread: legitimate only when the gaps themselves vanish
    out.verdict = std::abs(mean) <= 1e-14 * std::max(scale, 1.0)
                      ? CorrectionStats::Verdict::Pass
                      : CorrectionStats::Verdict::Fail;
  }
  return out;
}

CorrectionStats correction_identity_check(const std::vector<solver::Trajectory>& ensemble,
                                          const noise::QField& q, const ScalarField& psi) {
  std::vector<double> gaps;
  double scale = 0.0;
  double dt = 0.0;
  for (const auto& traj : ensemble) {
    GapParts p = correction_gap_parts(traj, q, psi);
    gaps.push_back(p.gap);
    scale = std::max(scale, p.magnitude);
    dt = traj.params.dt;
  }
  return correction_stats(gaps, dt, scale);
}

NoiseEnergySeries noise_energy_contribution(const solver::Trajectory& traj,
                                            const noise::QField& q) {
  NoiseEnergySeries out;
  double tol = 1e-10 * std::max(1.0, q.K() > 0 ? q.max_sup_norm() : 0.0);
  out.divergence_free = q.K() == 0 || q.max_divergence() <= tol;
  out.t.push_back(traj.t0);
  out.cumulative.push_back(0.0);
  double acc = 0.0;
  for (const auto& st : traj.steps) {
    acc -= st.noise_increment;  // records carry the ledger sign
    out.t.push_back(st.t);
    out.cumulative.push_back(acc);
  }
  return out;
}

}  // namespace cnstn::strat
