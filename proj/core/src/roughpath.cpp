#include "cnstn/roughpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cnstn/csv.hpp"

namespace cnstn::rough {

namespace {

// |Z(t_b) - Z(t_a)| in R^K.
double increment_norm(const noise::DriverPath& path, int a, int b) {
  const auto& va = path.values[static_cast<std::size_t>(a)];
  const auto& vb = path.values[static_cast<std::size_t>(b)];
  double s = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    const double d = vb[k] - va[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Pairwise |Z_{ab}|^p for all node pairs a < b, row-major (a * nodes + b).
std::vector<double> increment_powers(const noise::DriverPath& path, double p) {
  const int M = static_cast<int>(path.times.size());
  std::vector<double> pw(static_cast<std::size_t>(M) * M, 0.0);
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b)
      pw[static_cast<std::size_t>(a) * M + b] = std::pow(increment_norm(path, a, b), p);
  return pw;
}

}  // namespace

double p_variation(const noise::DriverPath& path, double p) {
  if (p < 1.0) throw std::invalid_argument("p_variation: p must be >= 1");
  path.validate();
  const int M = static_cast<int>(path.times.size());
  const std::vector<double> pw = increment_powers(path, p);
  // best[j] = sup over partitions of [t_0, t_j] ending at node j.
  std::vector<double> best(static_cast<std::size_t>(M), 0.0);
  for (int j = 1; j < M; ++j) {
    double b = 0.0;
    for (int i = 0; i < j; ++i)
      b = std::max(b, best[static_cast<std::size_t>(i)] + pw[static_cast<std::size_t>(i) * M + j]);
    best[static_cast<std::size_t>(j)] = b;
  }
  return std::pow(best[static_cast<std::size_t>(M) - 1], 1.0 / p);
}

Control::Control(std::vector<double> times, std::vector<double> table)
    : times_(std::move(times)), table_(std::move(table)) {
  if (table_.size() != times_.size() * times_.size())
    throw std::invalid_argument("Control: table/times size mismatch");
}

double Control::at(int a, int b) const {
  if (a > b) throw std::invalid_argument("Control::at: need a <= b");
  return table_[static_cast<std::size_t>(a) * times_.size() + static_cast<std::size_t>(b)];
}

double Control::superadditivity_defect() const {
  const int M = nodes();
  double defect = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < M; ++a)
    for (int b = a; b < M; ++b)
      for (int c = b; c < M; ++c) defect = std::max(defect, at(a, b) + at(b, c) - at(a, c));
  return defect;
}

Control control_from_path(const noise::DriverPath& path, double p) {
  if (p < 1.0) throw std::invalid_argument("control_from_path: p must be >= 1");
  path.validate();
  const int M = static_cast<int>(path.times.size());
  const std::vector<double> pw = increment_powers(path, p);
  std::vector<double> table(static_cast<std::size_t>(M) * M, 0.0);
  // One forward DP per start node: omega(a, j) for all j >= a.
  std::vector<double> best(static_cast<std::size_t>(M), 0.0);
  for (int a = 0; a < M; ++a) {
    std::fill(best.begin(), best.end(), 0.0);
    for (int j = a + 1; j < M; ++j) {
      double b = 0.0;
      for (int i = a; i < j; ++i)
        b = std::max(b, best[static_cast<std::size_t>(i)] + pw[static_cast<std::size_t>(i) * M + j]);
      best[static_cast<std::size_t>(j)] = b;
      table[static_cast<std::size_t>(a) * M + j] = b;
    }
  }
  return Control(path.times, std::move(table));
}

double chen_defect_triple(int K, const std::vector<double>& z_sb,
                          const std::vector<double>& z_bt,
                          const std::vector<double>& zz_sb,
                          const std::vector<double>& zz_bt,
                          const std::vector<double>& zz_st) {
  const std::size_t kk = static_cast<std::size_t>(K) * static_cast<std::size_t>(K);
  if (z_sb.size() != static_cast<std::size_t>(K) || z_bt.size() != static_cast<std::size_t>(K) ||
      zz_sb.size() != kk || zz_bt.size() != kk || zz_st.size() != kk)
    throw std::invalid_argument("chen_defect_triple: table sizes do not match K");
  double s = 0.0;
  for (int r = 0; r < K; ++r) {
    for (int c = 0; c < K; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(K) +
                            static_cast<std::size_t>(c);
      const double d = zz_st[i] - zz_sb[i] - zz_bt[i] -
                       z_sb[static_cast<std::size_t>(r)] * z_bt[static_cast<std::size_t>(c)];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

double chen_defect(const noise::GeometricLift& lift) {
  const int M = lift.nodes();
  const int K = lift.K();
  const auto& Z0 = lift.node_value(0);
  // Scratch for ZZ on the three subwindows, reused across the triple sweep.
  std::vector<double> zz_ab(static_cast<std::size_t>(K) * K);
  std::vector<double> zz_ac(static_cast<std::size_t>(K) * K);
  std::vector<double> zz_bc(static_cast<std::size_t>(K) * K);
  auto fill_zz = [&](int a, int b, std::vector<double>& out) {
    const auto& Pa = lift.prefix_area(a);
    const auto& Pb = lift.prefix_area(b);
    const auto& Za = lift.node_value(a);
    const auto& Zb = lift.node_value(b);
    for (int r = 0; r < K; ++r) {
      const double za = Za[static_cast<std::size_t>(r)] - Z0[static_cast<std::size_t>(r)];
      for (int c = 0; c < K; ++c) {
        const double dz = Zb[static_cast<std::size_t>(c)] - Za[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r) * K + c] =
            Pb[static_cast<std::size_t>(r) * K + c] - Pa[static_cast<std::size_t>(r) * K + c] -
            za * dz;
      }
    }
  };
  double defect = 0.0;
  for (int a = 0; a < M; ++a) {
    for (int b = a + 1; b < M; ++b) {
      fill_zz(a, b, zz_ab);
      const auto& Za = lift.node_value(a);
      const auto& Zb = lift.node_value(b);
      for (int c = b + 1; c < M; ++c) {
        fill_zz(a, c, zz_ac);
        fill_zz(b, c, zz_bc);
        const auto& Zc = lift.node_value(c);
        double s = 0.0;
        for (int r = 0; r < K; ++r) {
          const double zab = Zb[static_cast<std::size_t>(r)] - Za[static_cast<std::size_t>(r)];
          for (int cc = 0; cc < K; ++cc) {
            const double zbc = Zc[static_cast<std::size_t>(cc)] - Zb[static_cast<std::size_t>(cc)];
            const double d = zz_ac[static_cast<std::size_t>(r) * K + cc] -
                             zz_ab[static_cast<std::size_t>(r) * K + cc] -
                             zz_bc[static_cast<std::size_t>(r) * K + cc] - zab * zbc;
            s += d * d;
          }
        }
        defect = std::max(defect, std::sqrt(s));
      }
    }
  }
  return defect;
}

double geometricity_defect(const noise::GeometricLift& lift) {
  const int M = lift.nodes();
  const int K = lift.K();
  double defect = 0.0;
  for (int a = 0; a < M; ++a) {
    for (int b = a + 1; b < M; ++b) {
      const std::vector<double> z = lift.first_level(a, b);
      const std::vector<double> zz = lift.second_level(a, b);
      double s = 0.0;
      for (int r = 0; r < K; ++r) {
        for (int c = 0; c < K; ++c) {
          const double sym = 0.5 * (zz[static_cast<std::size_t>(r) * K + c] +
                                    zz[static_cast<std::size_t>(c) * K + r]);
          const double d = sym - 0.5 * z[static_cast<std::size_t>(r)] * z[static_cast<std::size_t>(c)];
          s += d * d;
        }
      }
      defect = std::max(defect, std::sqrt(s));
    }
  }
  return defect;
}

RoughDriverNorms driver_norms(const noise::QField& q, const noise::GeometricLift& lift,
                              double p) {
  if (!q.constant_in_space())
    throw std::invalid_argument(
        "driver_norms: rough driver constants are defined for constant coefficients only");
  if (p < 1.0) throw std::invalid_argument("driver_norms: p must be >= 1");
  RoughDriverNorms out;
  out.alpha = 1.0 / p;
  const double qmax = q.max_sup_norm();
  const int M = lift.nodes();
  for (int a = 0; a < M; ++a) {
    for (int b = a + 1; b < M; ++b) {
      const double h = lift.times()[static_cast<std::size_t>(b)] -
                       lift.times()[static_cast<std::size_t>(a)];
      out.c_a1 = std::max(out.c_a1,
                          lift.first_level_norm(a, b) * qmax / std::pow(h, out.alpha));
      out.c_a2 = std::max(out.c_a2, lift.second_level_norm(a, b) * qmax * qmax /
                                        std::pow(h, 2.0 * out.alpha));
    }
  }
  return out;
}

int RemainderTable::levels() const {
  int lo = 0, hi = -1;
  for (const auto& e : entries) {
    if (hi < 0) lo = hi = e.level;
    lo = std::min(lo, e.level);
    hi = std::max(hi, e.level);
  }
  return hi < 0 ? 0 : hi - lo + 1;
}

double RemainderTable::max_norm() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.norm);
  return m;
}

ExponentFit fit_scaling_exponent(const RemainderTable& table) {
  if (table.levels() < 3)
    throw std::invalid_argument("fit_scaling_exponent: need at least 3 dyadic levels");
  ExponentFit fit;
  if (table.max_norm() <= 1e-10 * table.scale) {
    fit.exact = true;
    return fit;
  }
  // Least squares of log(norm) on log(t - s); entries at roundoff are left
  // out so a handful of exact windows cannot drag the slope to -infinity.
  std::vector<double> xs, ys;
  for (const auto& e : table.entries) {
    if (e.norm <= 1e-14 * table.scale) continue;
    xs.push_back(std::log(e.t - e.s));
    ys.push_back(std::log(e.norm));
  }
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_scaling_exponent: degenerate abscissa");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.rms_residual = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

void export_remainder_csv(const RemainderTable& table, const std::string& filename) {
  std::vector<std::vector<double>> rows;
  rows.reserve(table.entries.size());
  for (const auto& e : table.entries)
    rows.push_back({static_cast<double>(e.level), e.s, e.t, e.norm});
  csv::write_table(filename, "remainder-table", {"level", "s", "t", "norm"}, rows);
}

}  // namespace cnstn::rough
