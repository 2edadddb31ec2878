#include "cnstn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cnstn::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where.empty() ? what : where + ": " + what);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end())
      fail(where, "unknown key \"" + item.key() + "\"");
  }
}

double get_number(const json& j, const std::string& key, double fallback,
                  const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) fail(where, "\"" + key + "\" must be a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) fail(where, "\"" + key + "\" must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) fail(where, "\"" + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string()) fail(where, "\"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::array<int, 3> parse_wavevector(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail(where, "\"k\" must be an array of " + std::to_string(dim) + " integers");
  std::array<int, 3> k{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    if (!j.at(static_cast<std::size_t>(a)).is_number_integer())
      fail(where, "\"k\" entries must be integers");
    k[static_cast<std::size_t>(a)] = j.at(static_cast<std::size_t>(a)).get<int>();
  }
  return k;
}

FieldSpec parse_field(const json& j, int dim, const std::string& where) {
  check_keys(j, {"mean", "modes"}, where);
  FieldSpec f;
  f.mean = get_number(j, "mean", 0.0, where);
  if (j.contains("modes")) {
    const auto& modes = j.at("modes");
    if (!modes.is_array()) fail(where, "\"modes\" must be an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string mw = where + ".modes[" + std::to_string(i) + "]";
      const auto& mj = modes.at(i);
      check_keys(mj, {"k", "cos", "sin"}, mw);
      if (!mj.contains("k")) fail(mw, "\"k\" is required");
      ModeAmp m;
      m.k = parse_wavevector(mj.at("k"), dim, mw);
      m.cos_amp = get_number(mj, "cos", 0.0, mw);
      m.sin_amp = get_number(mj, "sin", 0.0, mw);
      f.modes.push_back(m);
    }
  }
  return f;
}

QSpec parse_q(const json& j, int dim, int K, const std::string& where) {
  check_keys(j, {"kind", "vectors", "streams", "components"}, where);
  QSpec q;
  q.kind = get_string(j, "kind", "constant", where);
  if (q.kind == "constant") {
    if (!j.contains("vectors")) fail(where, "constant coefficients need \"vectors\"");
    const auto& vj = j.at("vectors");
    if (!vj.is_array() || static_cast<int>(vj.size()) != K)
      fail(where, "\"vectors\" must list exactly K = " + std::to_string(K) + " entries");
    for (const auto& row : vj) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        fail(where, "each vector must have " + std::to_string(dim) + " components");
      std::vector<double> v;
      for (const auto& x : row) {
        if (!x.is_number()) fail(where, "vector components must be numbers");
        v.push_back(x.get<double>());
      }
      q.vectors.push_back(std::move(v));
    }
  } else if (q.kind == "streamfunction") {
    if (dim != 2) fail(where, "stream-function coefficients are 2-d only");
    if (!j.contains("streams")) fail(where, "stream-function coefficients need \"streams\"");
    const auto& sj = j.at("streams");
    if (!sj.is_array() || static_cast<int>(sj.size()) != K)
      fail(where, "\"streams\" must list exactly K = " + std::to_string(K) + " entries");
    for (std::size_t i = 0; i < sj.size(); ++i)
      q.streams.push_back(parse_field(sj.at(i), dim, where + ".streams[" + std::to_string(i) + "]"));
  } else if (q.kind == "components") {
    if (!j.contains("components")) fail(where, "component coefficients need \"components\"");
    const auto& cj = j.at("components");
    if (!cj.is_array() || static_cast<int>(cj.size()) != K)
      fail(where, "\"components\" must list exactly K = " + std::to_string(K) + " entries");
    for (std::size_t i = 0; i < cj.size(); ++i) {
      const auto& row = cj.at(i);
      const std::string rw = where + ".components[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        fail(rw, "expected one field per axis");
      std::vector<FieldSpec> axes;
      for (std::size_t a = 0; a < row.size(); ++a)
        axes.push_back(parse_field(row.at(a), dim, rw + "[" + std::to_string(a) + "]"));
      q.components.push_back(std::move(axes));
    }
  } else {
    fail(where, "\"kind\" must be constant, streamfunction or components");
  }
  return q;
}

noise::SmoothDriverSpec parse_smooth(const json& j, int K, const std::string& where) {
  check_keys(j, {"linear", "waves"}, where);
  noise::SmoothDriverSpec s;
  s.linear.assign(static_cast<std::size_t>(K), 0.0);
  if (j.contains("linear")) {
    const auto& lj = j.at("linear");
    if (!lj.is_array() || static_cast<int>(lj.size()) != K)
      fail(where, "\"linear\" must list exactly K slopes");
    for (int k = 0; k < K; ++k) {
      if (!lj.at(static_cast<std::size_t>(k)).is_number())
        fail(where, "\"linear\" entries must be numbers");
      s.linear[static_cast<std::size_t>(k)] = lj.at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  s.waves.assign(static_cast<std::size_t>(K), {});
  if (j.contains("waves")) {
    const auto& wj = j.at("waves");
    if (!wj.is_array() || static_cast<int>(wj.size()) != K)
      fail(where, "\"waves\" must list exactly K wave lists");
    for (int k = 0; k < K; ++k) {
      const auto& row = wj.at(static_cast<std::size_t>(k));
      const std::string rw = where + ".waves[" + std::to_string(k) + "]";
      if (!row.is_array()) fail(rw, "expected an array of waves");
      for (const auto& one : row) {
        check_keys(one, {"amplitude", "frequency", "phase"}, rw);
        noise::Wave w;
        w.amplitude = get_number(one, "amplitude", 0.0, rw);
        w.frequency = get_number(one, "frequency", 0.0, rw);
        w.phase = get_number(one, "phase", 0.0, rw);
        s.waves[static_cast<std::size_t>(k)].push_back(w);
      }
    }
  } else {
    // deterministic default: one wave per component, amplitudes decaying
    for (int k = 0; k < K; ++k)
      s.waves[static_cast<std::size_t>(k)].push_back(
          noise::Wave{1.0 / (1.0 + k), 2.0 + static_cast<double>(k), 0.9 * k});
  }
  return s;
}

}  // namespace

int RunConfig::steps() const {
  double raw = params.T / params.dt;
  int n_steps = static_cast<int>(std::llround(raw));
  if (n_steps < 1 ||
      std::abs(static_cast<double>(n_steps) * params.dt - params.T) >
          1e-8 * std::max(params.T, 1.0))
    throw std::invalid_argument("dt must divide T");
  return n_steps;
}

int RunConfig::resolved_stride() const {
  if (stride > 0) return stride;
  return std::max(1, steps() / 256);
}

RunConfig parse_config(const std::string& text, bool informative) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("configuration is not valid JSON: ") + e.what());
  }

  check_keys(j,
             {"grid", "params", "initial", "noise", "experiment", "stride", "ensemble",
              "audit", "out", "test_hooks"},
             "");

  RunConfig c;
  c.informative = informative;

  if (!j.contains("grid")) fail("", "\"grid\" is required");
  {
    const auto& gj = j.at("grid");
    check_keys(gj, {"dim", "m", "n"}, "grid");
    c.dim = get_int(gj, "dim", 2, "grid");
    c.m = get_int(gj, "m", 8, "grid");
    c.n = get_int(gj, "n", 4 * c.m, "grid");
    if (c.dim < 1 || c.dim > 3) fail("grid", "\"dim\" must be 1, 2 or 3");
    if (c.m < 1) fail("grid", "\"m\" must be positive");
    if (c.n < 2 * c.m + 2) fail("grid", "\"n\" must be at least 2m + 2");
    if (c.n % 2 != 0) fail("grid", "\"n\" must be even");
  }

  if (j.contains("params")) {
    const auto& pj = j.at("params");
    check_keys(pj,
               {"gamma", "a", "mu", "eta", "epsilon", "delta", "beta", "dt", "T",
                "density_floor", "stress_d_factor"},
               "params");
    auto& p = c.params;
    p.gamma = get_number(pj, "gamma", p.gamma, "params");
    p.a = get_number(pj, "a", p.a, "params");
    p.mu = get_number(pj, "mu", p.mu, "params");
    p.eta = get_number(pj, "eta", p.eta, "params");
    p.epsilon = get_number(pj, "epsilon", p.epsilon, "params");
    p.delta = get_number(pj, "delta", p.delta, "params");
    p.beta = get_number(pj, "beta", p.beta, "params");
    p.dt = get_number(pj, "dt", p.dt, "params");
    p.T = get_number(pj, "T", p.T, "params");
    p.density_floor = get_number(pj, "density_floor", p.density_floor, "params");
    p.stress_d_factor = get_number(pj, "stress_d_factor", p.stress_d_factor, "params");
  }
  c.params.m = c.m;
  c.params.validate(c.dim);

  if (j.contains("initial")) {
    const auto& ij = j.at("initial");
    check_keys(ij, {"rho", "u"}, "initial");
    if (ij.contains("rho")) c.rho0 = parse_field(ij.at("rho"), c.dim, "initial.rho");
    if (ij.contains("u")) {
      const auto& uj = ij.at("u");
      if (!uj.is_array() || static_cast<int>(uj.size()) != c.dim)
        fail("initial", "\"u\" must list one field per axis");
      for (std::size_t a = 0; a < uj.size(); ++a)
        c.u0.push_back(parse_field(uj.at(a), c.dim, "initial.u[" + std::to_string(a) + "]"));
    }
  }
  if (c.rho0.mean == 0.0 && c.rho0.modes.empty()) c.rho0.mean = 1.0;
  if (c.u0.empty()) c.u0.assign(static_cast<std::size_t>(c.dim), FieldSpec{});

  if (j.contains("noise")) {
    const auto& nj = j.at("noise");
    check_keys(nj, {"kind", "K", "q", "seed", "smooth", "wong_zakai_levels", "p"}, "noise");
    auto& ns = c.noise;
    ns.kind = get_string(nj, "kind", "none", "noise");
    if (ns.kind != "none" && ns.kind != "smooth" && ns.kind != "brownian")
      fail("noise", "\"kind\" must be none, smooth or brownian");
    ns.K = get_int(nj, "K", ns.kind == "none" ? 0 : 1, "noise");
    if (ns.kind == "none" && ns.K != 0) fail("noise", "kind none requires K = 0");
    if (ns.kind != "none" && ns.K < 1) fail("noise", "\"K\" must be positive");
    if (nj.contains("seed")) {
      const auto& sj = nj.at("seed");
      if (!sj.is_number_unsigned() && !sj.is_number_integer())
        fail("noise", "\"seed\" must be an integer");
      ns.seed = sj.get<std::uint64_t>();
    }
    if (ns.K > 0) {
      if (!nj.contains("q")) fail("noise", "\"q\" is required when K > 0");
      ns.q = parse_q(nj.at("q"), c.dim, ns.K, "noise.q");
    }
    if (ns.kind == "smooth")
      ns.smooth = nj.contains("smooth") ? parse_smooth(nj.at("smooth"), ns.K, "noise.smooth")
                                        : parse_smooth(json::object(), ns.K, "noise.smooth");
    if (nj.contains("wong_zakai_levels")) {
      const auto& wj = nj.at("wong_zakai_levels");
      if (!wj.is_array() || wj.size() != 2 || !wj.at(0).is_number_integer() ||
          !wj.at(1).is_number_integer())
        fail("noise", "\"wong_zakai_levels\" must be [lo, hi]");
      ns.wz_level_lo = wj.at(0).get<int>();
      ns.wz_level_hi = wj.at(1).get<int>();
      if (ns.wz_level_lo < 1 || ns.wz_level_hi < ns.wz_level_lo)
        fail("noise", "\"wong_zakai_levels\" must satisfy 1 <= lo <= hi");
    }
    ns.p = get_number(nj, "p", ns.p, "noise");
    if (!(ns.p > 2.0 && ns.p < 3.0))
      fail("noise", "\"p\" must lie in (2, 3)");

    if (ns.kind == "brownian" && ns.K > 0 && ns.q.kind != "constant") {
      if (informative)
        c.scope_notes.push_back(
            "brownian driving with non-constant coefficients is outside the supported "
            "scope; results are informative only");
      else
        fail("noise", "brownian driving requires constant coefficients");
    }
  }

  c.experiment = get_string(j, "experiment", c.experiment, "");
  c.stride = get_int(j, "stride", 0, "");
  if (c.stride < 0) fail("", "\"stride\" must be nonnegative");
  c.ensemble = get_int(j, "ensemble", c.ensemble, "");
  if (c.ensemble < 1) fail("", "\"ensemble\" must be positive");
  c.audit = get_bool(j, "audit", true, "");
  c.out = get_string(j, "out", "", "");

  if (j.contains("test_hooks")) {
    const auto& hj = j.at("test_hooks");
    check_keys(hj, {"corrupt_lift", "identical_realizations"}, "test_hooks");
    c.hooks.corrupt_lift = get_bool(hj, "corrupt_lift", false, "test_hooks");
    c.hooks.identical_realizations =
        get_bool(hj, "identical_realizations", false, "test_hooks");
  }

  c.steps();  // dt | T check
  return c;
}

RunConfig load_config_file(const std::string& path, bool informative) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read configuration file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), informative);
}

std::string resolved_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"dim", c.dim}, {"m", c.m}, {"n", c.n}};
  j["params"] = {{"gamma", c.params.gamma},
                 {"a", c.params.a},
                 {"mu", c.params.mu},
                 {"eta", c.params.eta},
                 {"epsilon", c.params.epsilon},
                 {"delta", c.params.delta},
                 {"beta", c.params.beta},
                 {"dt", c.params.dt},
                 {"T", c.params.T},
                 {"density_floor", c.params.density_floor},
                 {"stress_d_factor", c.params.stress_d_factor}};
  auto field_json = [](const FieldSpec& f) {
    json out;
    out["mean"] = f.mean;
    out["modes"] = json::array();
    for (const auto& m : f.modes) {
      json mj;
      mj["k"] = {m.k[0], m.k[1], m.k[2]};
      mj["cos"] = m.cos_amp;
      mj["sin"] = m.sin_amp;
      out["modes"].push_back(mj);
    }
    return out;
  };
  j["initial"]["rho"] = field_json(c.rho0);
  j["initial"]["u"] = json::array();
  for (const auto& f : c.u0) j["initial"]["u"].push_back(field_json(f));

  json nj;
  nj["kind"] = c.noise.kind;
  nj["K"] = c.noise.K;
  nj["seed"] = c.noise.seed;
  nj["p"] = c.noise.p;
  nj["wong_zakai_levels"] = {c.noise.wz_level_lo, c.noise.wz_level_hi};
  if (c.noise.K > 0) {
    json qj;
    qj["kind"] = c.noise.q.kind;
    if (c.noise.q.kind == "constant") {
      qj["vectors"] = c.noise.q.vectors;
    } else if (c.noise.q.kind == "streamfunction") {
      qj["streams"] = json::array();
      for (const auto& s : c.noise.q.streams) qj["streams"].push_back(field_json(s));
    } else {
      qj["components"] = json::array();
      for (const auto& row : c.noise.q.components) {
        json rj = json::array();
        for (const auto& s : row) rj.push_back(field_json(s));
        qj["components"].push_back(rj);
      }
    }
    nj["q"] = qj;
  }
  if (c.noise.kind == "smooth") {
    json sj;
    sj["linear"] = c.noise.smooth.linear;
    sj["waves"] = json::array();
    for (const auto& row : c.noise.smooth.waves) {
      json rj = json::array();
      for (const auto& w : row)
        rj.push_back({{"amplitude", w.amplitude}, {"frequency", w.frequency}, {"phase", w.phase}});
      sj["waves"].push_back(rj);
    }
    nj["smooth"] = sj;
  }
  j["noise"] = nj;

  j["experiment"] = c.experiment;
  j["stride"] = c.resolved_stride();
  j["ensemble"] = c.ensemble;
  j["audit"] = c.audit;
  j["steps"] = c.steps();
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.scope_notes.empty()) j["scope_notes"] = c.scope_notes;
  if (c.hooks.corrupt_lift || c.hooks.identical_realizations)
    j["test_hooks"] = {{"corrupt_lift", c.hooks.corrupt_lift},
                       {"identical_realizations", c.hooks.identical_realizations}};
  return j.dump(2);
}

ScalarField build_scalar(const FieldSpec& spec, const TorusGrid& g) {
  ScalarField f(g);
  auto& c = f.coeffs_mut();
  c[0] = spec.mean;
  for (const auto& m : spec.modes) {
    if (TorusGrid::band(m.k) > g.points / 2 - 1)
      throw std::invalid_argument("initial mode outside the resolvable band");
    std::array<int, 3> neg{-m.k[0], -m.k[1], -m.k[2]};
    for (int a = g.dim; a < 3; ++a) neg[static_cast<std::size_t>(a)] = 0;
    c[g.index_of(m.k)] += std::complex<double>(0.5 * m.cos_amp, -0.5 * m.sin_amp);
    c[g.index_of(neg)] += std::complex<double>(0.5 * m.cos_amp, 0.5 * m.sin_amp);
  }
  return f;
}

VectorField build_vector(const std::vector<FieldSpec>& spec, const TorusGrid& g) {
  if (static_cast<int>(spec.size()) != g.dim)
    throw std::invalid_argument("expected one field spec per axis");
  VectorField v(g);
  for (int a = 0; a < g.dim; ++a) v[a] = build_scalar(spec[static_cast<std::size_t>(a)], g);
  return v;
}

noise::QField build_q(const NoiseSpec& spec, const TorusGrid& g) {
  if (spec.K == 0) return noise::QField::none(g);
  if (spec.q.kind == "constant") return noise::QField::constant(g, spec.q.vectors);
  if (spec.q.kind == "streamfunction") {
    std::vector<ScalarField> streams;
    for (const auto& s : spec.q.streams) streams.push_back(build_scalar(s, g));
    return noise::QField::streamfunction(g, streams);
  }
  std::vector<VectorField> comps;
  for (const auto& row : spec.q.components) comps.push_back(build_vector(row, g));
  return noise::QField::from_components(g, comps);
}

noise::DriverPath build_driver(const NoiseSpec& spec, double T, int steps,
                               std::uint64_t realization) {
  if (spec.kind == "brownian") return noise::sample_brownian(spec.K, T, steps, spec.seed, realization);
  if (spec.kind == "smooth") return noise::smooth_driver(spec.smooth, T, steps);
  noise::DriverPath p;
  p.times = {0.0, T};
  p.values = {{}, {}};
  return p;
}

}  // namespace cnstn::config
