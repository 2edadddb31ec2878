#include "cnstn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "cnstn/csv.hpp"
#include "cnstn/rng.hpp"
#include "cnstn/spectral.hpp"

namespace cnstn::noise {

// ---------------------------------------------------------------- QField --

QField::QField(const TorusGrid& g, Kind kind) : grid_(g), kind_(kind) {}

QField QField::none(const TorusGrid& g) {
  QField q(g, Kind::Constant);
  q.K_ = 0;
  return q;
}

QField QField::constant(const TorusGrid& g, std::vector<std::vector<double>> vectors) {
  QField q(g, Kind::Constant);
  q.K_ = static_cast<int>(vectors.size());
  if (q.K_ == 0) throw std::invalid_argument("QField: need at least one component");
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != g.dim)
      throw std::invalid_argument("QField: coefficient vector dimension mismatch");
  q.vectors_ = std::move(vectors);
  for (int k = 0; k < q.K_; ++k) {
    VectorField f(g);
    for (int a = 0; a < g.dim; ++a) {
      auto& c = f[a].coeffs_mut();
      c[0] = q.vectors_[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
    }
    q.fields_.push_back(std::move(f));
  }
  q.cache_norms();
  return q;
}

QField QField::streamfunction(const TorusGrid& g, const std::vector<ScalarField>& streams) {
  if (g.dim != 2)
    throw std::invalid_argument("QField::streamfunction: stream functions are 2-d only");
  if (streams.empty()) throw std::invalid_argument("QField: need at least one component");
  QField q(g, Kind::Smooth);
  q.K_ = static_cast<int>(streams.size());
  for (const auto& psi : streams) {
    VectorField f(g);
    f[0] = spectral::derivative(psi, 1);
    f[1] = spectral::derivative(psi, 0) * -1.0;
    q.fields_.push_back(std::move(f));
  }
  q.cache_norms();
  return q;
}

QField QField::from_components(const TorusGrid& g, std::vector<VectorField> comps) {
  if (comps.empty()) throw std::invalid_argument("QField: need at least one component");
  QField q(g, Kind::Smooth);
  q.K_ = static_cast<int>(comps.size());
  q.fields_ = std::move(comps);
  q.cache_norms();
  return q;
}

void QField::cache_norms() {
  sup_norm_.clear();
  w2inf_norm_.clear();
  for (int k = 0; k < K_; ++k) {
    const VectorField& f = fields_[static_cast<std::size_t>(k)];
    double sup = 0.0;
    const std::size_t npts = grid_.size();
    for (std::size_t i = 0; i < npts; ++i) {
      double s2 = 0.0;
      for (int a = 0; a < grid_.dim; ++a) s2 += f[a].values()[i] * f[a].values()[i];
      sup = std::max(sup, std::sqrt(s2));
    }
    sup_norm_.push_back(sup);

    double w2 = sup;
    for (int a = 0; a < grid_.dim; ++a) {
      for (int d1 = 0; d1 < grid_.dim; ++d1) {
        ScalarField g1 = spectral::derivative(f[a], d1);
        w2 = std::max(w2, std::max(std::abs(spectral::min_value(g1)),
                                   std::abs(spectral::max_value(g1))));
        for (int d2 = d1; d2 < grid_.dim; ++d2) {
          ScalarField g2 = spectral::derivative(g1, d2);
          w2 = std::max(w2, std::max(std::abs(spectral::min_value(g2)),
                                     std::abs(spectral::max_value(g2))));
        }
      }
    }
    w2inf_norm_.push_back(w2);
  }
}

const std::vector<double>& QField::vec(int k) const {
  if (kind_ != Kind::Constant) throw std::logic_error("QField::vec: not a constant field");
  return vectors_[static_cast<std::size_t>(k)];
}

const VectorField& QField::field(int k) const { return fields_[static_cast<std::size_t>(k)]; }

double QField::max_sup_norm() const {
  double m = 0.0;
  for (double s : sup_norm_) m = std::max(m, s);
  return m;
}

ScalarField QField::divergence(int k) const {
  if (kind_ == Kind::Constant) return ScalarField(grid_);
  return spectral::divergence(fields_[static_cast<std::size_t>(k)]);
}

double QField::max_divergence() const {
  double m = 0.0;
  for (int k = 0; k < K_; ++k) {
    ScalarField d = divergence(k);
    m = std::max(m, std::max(std::abs(spectral::min_value(d)), std::abs(spectral::max_value(d))));
  }
  return m;
}

// ------------------------------------------------------------ DriverPath --

void DriverPath::validate() const {
  if (times.size() < 2) throw std::invalid_argument("DriverPath: need at least two nodes");
  if (times.size() != values.size())
    throw std::invalid_argument("DriverPath: times/values size mismatch");
  if (times.front() != 0.0) throw std::invalid_argument("DriverPath: paths start at t = 0");
  // K = 0 is legal: the empty-component path is the noise-free driver.
  const std::size_t k = values.front().size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("DriverPath: times must increase strictly");
    if (values[i].size() != k) throw std::invalid_argument("DriverPath: ragged values");
  }
}

int DriverPath::segment_index(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int i = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(i, 0, segments() - 1);
}

std::vector<double> DriverPath::value_at(double t) const {
  int i = segment_index(t);
  const double t0 = times[static_cast<std::size_t>(i)];
  const double t1 = times[static_cast<std::size_t>(i) + 1];
  const double w = (t - t0) / (t1 - t0);
  std::vector<double> out(values[static_cast<std::size_t>(i)].size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (1.0 - w) * values[static_cast<std::size_t>(i)][k] +
             w * values[static_cast<std::size_t>(i) + 1][k];
  }
  return out;
}

std::vector<double> DriverPath::slope_at(double t) const {
  int i = segment_index(t);
  const double dt = times[static_cast<std::size_t>(i) + 1] - times[static_cast<std::size_t>(i)];
  std::vector<double> out(values[static_cast<std::size_t>(i)].size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (values[static_cast<std::size_t>(i) + 1][k] - values[static_cast<std::size_t>(i)][k]) / dt;
  }
  return out;
}

std::vector<double> DriverPath::increment(int node_a, int node_b) const {
  std::vector<double> out(values[static_cast<std::size_t>(node_a)].size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = values[static_cast<std::size_t>(node_b)][k] - values[static_cast<std::size_t>(node_a)][k];
  return out;
}

DriverPath sample_brownian(int K, double T, int steps, std::uint64_t seed,
                           std::uint64_t realization) {
  if (K < 1 || steps < 1 || !(T > 0.0)) throw std::invalid_argument("sample_brownian: bad shape");
  DriverPath p;
  p.times.resize(static_cast<std::size_t>(steps) + 1);
  p.values.assign(static_cast<std::size_t>(steps) + 1, std::vector<double>(static_cast<std::size_t>(K), 0.0));
  const double dt = T / steps;
  for (int i = 0; i <= steps; ++i) p.times[static_cast<std::size_t>(i)] = T * i / steps;
  const double root_dt = std::sqrt(dt);
  for (int k = 0; k < K; ++k) {
    rng::CounterStream stream(seed, realization, static_cast<std::uint64_t>(k));
    double acc = 0.0;
    for (int i = 0; i < steps; ++i) {
      acc += root_dt * stream.normal(static_cast<std::uint64_t>(i));
      p.values[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)] = acc;
    }
  }
  return p;
}

DriverPath smooth_driver(const SmoothDriverSpec& spec, double T, int steps) {
  const int K = static_cast<int>(std::max(spec.linear.size(), spec.waves.size()));
  if (K == 0) throw std::invalid_argument("smooth_driver: empty spec");
  if (!spec.linear.empty() && !spec.waves.empty() && spec.linear.size() != spec.waves.size())
    throw std::invalid_argument("smooth_driver: linear/waves component count mismatch");
  DriverPath p;
  p.times.resize(static_cast<std::size_t>(steps) + 1);
  p.values.assign(static_cast<std::size_t>(steps) + 1, std::vector<double>(static_cast<std::size_t>(K), 0.0));
  for (int i = 0; i <= steps; ++i) {
    const double t = T * i / steps;
    p.times[static_cast<std::size_t>(i)] = t;
    for (int k = 0; k < K; ++k) {
      double v = 0.0;
      if (static_cast<std::size_t>(k) < spec.linear.size()) v += spec.linear[static_cast<std::size_t>(k)] * t;
      if (static_cast<std::size_t>(k) < spec.waves.size())
        for (const Wave& w : spec.waves[static_cast<std::size_t>(k)])
          v += w.amplitude * std::sin(w.frequency * t + w.phase);
      p.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v;
    }
  }
  return p;
}

DriverPath mollify(const DriverPath& path, int level) {
  if (level < 0) throw std::invalid_argument("mollify: level must be >= 0");
  const double T = path.T();
  const int segs = 1 << level;
  DriverPath out;
  out.times.resize(static_cast<std::size_t>(segs) + 1);
  out.values.resize(static_cast<std::size_t>(segs) + 1);
  for (int i = 0; i <= segs; ++i) {
    const double t = T * i / segs;
    out.times[static_cast<std::size_t>(i)] = t;
    out.values[static_cast<std::size_t>(i)] = path.value_at(t);
  }
  return out;
}

std::vector<std::vector<double>> derivative_steps(const DriverPath& path) {
  std::vector<std::vector<double>> slopes;
  slopes.reserve(static_cast<std::size_t>(path.segments()));
  for (int i = 0; i < path.segments(); ++i) {
    const double dt = path.times[static_cast<std::size_t>(i) + 1] - path.times[static_cast<std::size_t>(i)];
    std::vector<double> s(static_cast<std::size_t>(path.K()));
    for (int k = 0; k < path.K(); ++k)
      s[static_cast<std::size_t>(k)] =
          (path.values[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)] -
           path.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) / dt;
    slopes.push_back(std::move(s));
  }
  return slopes;
}

// --------------------------------------------------------- GeometricLift --

GeometricLift GeometricLift::from_path(const DriverPath& path) {
  path.validate();
  const int K = path.K();
  const int M = path.segments();
  std::vector<std::vector<double>> prefix(static_cast<std::size_t>(M) + 1,
                                          std::vector<double>(static_cast<std::size_t>(K) * K, 0.0));
  const auto& Z0 = path.values[0];
  for (int i = 0; i < M; ++i) {
    const auto& Zi = path.values[static_cast<std::size_t>(i)];
    const auto& Zn = path.values[static_cast<std::size_t>(i) + 1];
    auto& next = prefix[static_cast<std::size_t>(i) + 1];
    next = prefix[static_cast<std::size_t>(i)];
    for (int r = 0; r < K; ++r) {
      const double zr = Zi[static_cast<std::size_t>(r)] - Z0[static_cast<std::size_t>(r)];
      const double dzr = Zn[static_cast<std::size_t>(r)] - Zi[static_cast<std::size_t>(r)];
      for (int c = 0; c < K; ++c) {
        const double dzc = Zn[static_cast<std::size_t>(c)] - Zi[static_cast<std::size_t>(c)];
        next[static_cast<std::size_t>(r) * K + c] += zr * dzc + 0.5 * dzr * dzc;
      }
    }
  }
  return GeometricLift(path.times, path.values, std::move(prefix));
}

GeometricLift::GeometricLift(std::vector<double> times, std::vector<std::vector<double>> values,
                             std::vector<std::vector<double>> prefix_area)
    : times_(std::move(times)), values_(std::move(values)), prefix_(std::move(prefix_area)) {
  if (times_.size() != values_.size() || times_.size() != prefix_.size())
    throw std::invalid_argument("GeometricLift: table size mismatch");
  K_ = values_.empty() ? 0 : static_cast<int>(values_[0].size());
}

std::vector<double> GeometricLift::first_level(int a, int b) const {
  std::vector<double> z(static_cast<std::size_t>(K_));
  for (int k = 0; k < K_; ++k)
    z[static_cast<std::size_t>(k)] = values_[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] -
                                     values_[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
  return z;
}

std::vector<double> GeometricLift::second_level(int a, int b) const {
  std::vector<double> zz(static_cast<std::size_t>(K_) * K_);
  const auto& Pa = prefix_[static_cast<std::size_t>(a)];
  const auto& Pb = prefix_[static_cast<std::size_t>(b)];
  const auto& Z0 = values_[0];
  const auto& Za = values_[static_cast<std::size_t>(a)];
  const auto& Zb = values_[static_cast<std::size_t>(b)];
  for (int r = 0; r < K_; ++r) {
    const double za = Za[static_cast<std::size_t>(r)] - Z0[static_cast<std::size_t>(r)];
    for (int c = 0; c < K_; ++c) {
      const double dz = Zb[static_cast<std::size_t>(c)] - Za[static_cast<std::size_t>(c)];
      zz[static_cast<std::size_t>(r) * K_ + c] =
          Pb[static_cast<std::size_t>(r) * K_ + c] - Pa[static_cast<std::size_t>(r) * K_ + c] - za * dz;
    }
  }
  return zz;
}

double GeometricLift::first_level_norm(int a, int b) const {
  double s = 0.0;
  for (double z : first_level(a, b)) s += z * z;
  return std::sqrt(s);
}

double GeometricLift::second_level_norm(int a, int b) const {
  double s = 0.0;
  for (double z : second_level(a, b)) s += z * z;
  return std::sqrt(s);
}

// --------------------------------------------------------------- CSV i/o --

void export_path_csv(const DriverPath& path, std::ostream& os) {
  csv::write_schema_line(os, "driver-path");
  os << "t";
  for (int k = 1; k <= path.K(); ++k) os << ",Z_" << k;
  os << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    os << path.times[i];
    for (double v : path.values[i]) os << "," << v;
    os << "\n";
  }
}

void export_path_csv(const DriverPath& path, const std::string& filename) {
  std::ofstream os(filename);
  if (!os) throw std::runtime_error("export_path_csv: cannot open " + filename);
  export_path_csv(path, os);
}

DriverPath import_path_csv(std::istream& is) {
  csv::Table t = csv::read_table(is, "driver-path");
  DriverPath p;
  for (const auto& row : t.rows) {
    if (row.empty()) continue;
    p.times.push_back(row[0]);
    p.values.emplace_back(row.begin() + 1, row.end());
  }
  p.validate();
  return p;
}

DriverPath import_path_csv(const std::string& filename) {
  std::ifstream is(filename);
  if (!is) throw std::runtime_error("import_path_csv: cannot open " + filename);
  return import_path_csv(is);
}

}  // namespace cnstn::noise
