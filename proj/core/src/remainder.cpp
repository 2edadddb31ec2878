#include "cnstn/remainder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnstn::rough {

using solver::ModeBlock;

std::vector<TestMode> test_basis(int dim, int cutoff) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");
  std::vector<TestMode> out;
  std::array<int, 3> k{0, 0, 0};
  const int lo1 = dim > 1 ? -cutoff : 0, hi1 = dim > 1 ? cutoff : 0;
  const int lo2 = dim > 2 ? -cutoff : 0, hi2 = dim > 2 ? cutoff : 0;
  for (k[0] = -cutoff; k[0] <= cutoff; ++k[0])
    for (k[1] = lo1; k[1] <= hi1; ++k[1])
      for (k[2] = lo2; k[2] <= hi2; ++k[2]) {
        // keep one representative of {k, -k}: first nonzero component positive
        int first = 0;
        for (int a = 0; a < dim; ++a) {
          if (k[static_cast<std::size_t>(a)] != 0) {
            first = k[static_cast<std::size_t>(a)];
            break;
          }
        }
        if (first < 0) continue;
        double band = static_cast<double>(TorusGrid::band(k));
        double w = std::max(1.0, band * band * band);
        out.push_back(TestMode{k, false, w});          // cos(k.x); k = 0 is the constant
        if (first > 0) out.push_back(TestMode{k, true, w});  // sin(k.x)
      }
  return out;
}

namespace {

struct Pairings {
  double cos_part;  // <f, cos(k.x)> = vol Re f_k
  double sin_part;  // <f, sin(k.x)> = -vol Im f_k
};

Pairings pair_block(const ModeBlock& b, const std::array<int, 3>& k, double vol) {
  auto c = b.at(k);
  return {vol * c.real(), -vol * c.imag()};
}

}  // namespace

RemainderTable remainder_table(const solver::Trajectory& traj, const noise::QField& q,
                               const noise::GeometricLift& lift, int max_level) {
  if (!q.constant_in_space())
    throw std::invalid_argument("the remainder expansion requires constant coefficients");
  if (traj.states.empty()) throw std::invalid_argument("trajectory holds no snapshots");
  if (max_level < 1) throw std::invalid_argument("max_level must be at least 1");

  const TorusGrid& g = traj.states.front().grid();
  const int dim = g.dim;
  const double vol = g.volume();
  const int S = traj.steps_taken();
  const int K = q.K();
  if (lift.K() != K) throw std::invalid_argument("lift components do not match the coefficients");
  if (lift.nodes() != S + 1)
    throw std::invalid_argument("lift nodes do not match the trajectory step grid");
  if (S % (1 << max_level) != 0)
    throw std::invalid_argument("step count must be divisible by 2^max_level");
  const double t_err = std::abs(lift.times().back() - traj.steps.back().t);
  if (t_err > 1e-9 * std::max(1.0, std::abs(traj.steps.back().t)))
    throw std::invalid_argument("lift time grid does not match the trajectory");

  // Q_k . kappa for every coefficient and test mode is recomputed on the fly;
  // the heavy data are the node blocks and drift prefix sums below.
  const int n_eq = 1 + dim;  // density, then momentum components

  // node blocks per equation: node 0 from the initial window, node i >= 1
  // from the end of step i - 1
  auto node_block = [&](int eq, int i) -> const ModeBlock& {
    if (i == 0) return eq == 0 ? traj.rho_block0 : traj.q_block0[static_cast<std::size_t>(eq - 1)];
    const auto& st = traj.steps[static_cast<std::size_t>(i - 1)];
    return eq == 0 ? st.rho_block : st.q_block[static_cast<std::size_t>(eq - 1)];
  };

  // drift prefix sums: prefix[eq][i] = sum of the first i drift blocks
  std::vector<std::vector<ModeBlock>> prefix(static_cast<std::size_t>(n_eq));
  for (int eq = 0; eq < n_eq; ++eq) {
    auto& pe = prefix[static_cast<std::size_t>(eq)];
    pe.reserve(static_cast<std::size_t>(S + 1));
    pe.push_back(ModeBlock(dim, traj.block_cutoff));
    for (int i = 0; i < S; ++i) {
      const auto& st = traj.steps[static_cast<std::size_t>(i)];
      ModeBlock next = pe.back();
      next.add_scaled(eq == 0 ? st.cont_drift : st.mom_drift[static_cast<std::size_t>(eq - 1)],
                      1.0);
      pe.push_back(std::move(next));
    }
  }

  std::vector<TestMode> basis = test_basis(dim, traj.block_cutoff);

  double scale = 0.0;
  for (int eq = 0; eq < n_eq; ++eq)
    for (int i = 0; i <= S; ++i)
      for (const auto& c : node_block(eq, i).c) scale = std::max(scale, vol * std::abs(c));

  RemainderTable table;
  table.scale = std::max(scale, 1e-300);

  std::vector<double> qdot(static_cast<std::size_t>(K), 0.0);
  for (int level = 1; level <= max_level; ++level) {
    const int n_win = 1 << level;
    const int width = S / n_win;
    for (int wdx = 0; wdx < n_win; ++wdx) {
      const int a = wdx * width;
      const int b = a + width;
      std::vector<double> Z = lift.first_level(a, b);
      std::vector<double> ZZ = lift.second_level(a, b);

      double norm = 0.0;
      for (const auto& mode : basis) {
        for (int k = 0; k < K; ++k) {
          const auto& v = q.vec(k);
          double dot = 0.0;
          for (int ax = 0; ax < dim; ++ax)
            dot += v[static_cast<std::size_t>(ax)] *
                   static_cast<double>(mode.k[static_cast<std::size_t>(ax)]);
          qdot[static_cast<std::size_t>(k)] = dot;
        }
        for (int eq = 0; eq < n_eq; ++eq) {
          Pairings pa = pair_block(node_block(eq, a), mode.k, vol);
          Pairings pb = pair_block(node_block(eq, b), mode.k, vol);
          Pairings da = pair_block(prefix[static_cast<std::size_t>(eq)][static_cast<std::size_t>(a)],
                                   mode.k, vol);
          Pairings db = pair_block(prefix[static_cast<std::size_t>(eq)][static_cast<std::size_t>(b)],
                                   mode.k, vol);

          double delta_f = mode.sine ? pb.sin_part - pa.sin_part : pb.cos_part - pa.cos_part;
          double delta_drift = mode.sine ? db.sin_part - da.sin_part : db.cos_part - da.cos_part;

          // h_k(a) = <f_a, Q_k . grad phi>, g_lk(a) = <f_a, Q_l . grad (Q_k . grad phi)>
          double v_nat = delta_f - delta_drift;
          for (int k = 0; k < K; ++k) {
            double h = mode.sine ? qdot[static_cast<std::size_t>(k)] * pa.cos_part
                                 : -qdot[static_cast<std::size_t>(k)] * pa.sin_part;
            v_nat += h * Z[static_cast<std::size_t>(k)];
          }
          for (int l = 0; l < K; ++l)
            for (int k = 0; k < K; ++k) {
              double base = mode.sine ? pa.sin_part : pa.cos_part;
              double g_lk = -qdot[static_cast<std::size_t>(l)] *
                            qdot[static_cast<std::size_t>(k)] * base;
              v_nat -= g_lk * ZZ[static_cast<std::size_t>(l * K + k)];
            }
          norm = std::max(norm, std::abs(v_nat) / mode.w3inf);
        }
      }
      table.entries.push_back(RemainderEntry{level, lift.times()[static_cast<std::size_t>(a)],
                                             lift.times()[static_cast<std::size_t>(b)], norm});
    }
  }
  return table;
}

}  // namespace cnstn::rough
