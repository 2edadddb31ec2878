#include "cnstn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cnstn::io {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint sidecars are little-endian float64; big-endian hosts "
              "would need byte swapping here");

void write_cube(std::ofstream& out, const std::vector<std::complex<double>>& c) {
  for (const auto& z : c) {
    double re = z.real(), im = z.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
}

void read_cube(std::ifstream& in, std::vector<std::complex<double>>& c) {
  for (auto& z : c) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(double));
    in.read(reinterpret_cast<char*>(&im), sizeof(double));
    z = {re, im};
  }
}

json params_to_json(const solver::SchemeParams& p) {
  return json{{"gamma", p.gamma},
              {"a", p.a},
              {"mu", p.mu},
              {"eta", p.eta},
              {"epsilon", p.epsilon},
              {"delta", p.delta},
              {"beta", p.beta},
              {"m", p.m},
              {"dt", p.dt},
              {"T", p.T},
              {"density_floor", p.density_floor},
              {"stress_d_factor", p.stress_d_factor}};
}

solver::SchemeParams params_from_json(const json& j) {
  solver::SchemeParams p;
  p.gamma = j.at("gamma").get<double>();
  p.a = j.at("a").get<double>();
  p.mu = j.at("mu").get<double>();
  p.eta = j.at("eta").get<double>();
  p.epsilon = j.at("epsilon").get<double>();
  p.delta = j.at("delta").get<double>();
  p.beta = j.at("beta").get<double>();
  p.m = j.at("m").get<int>();
  p.dt = j.at("dt").get<double>();
  p.T = j.at("T").get<double>();
  p.density_floor = j.at("density_floor").get<double>();
  p.stress_d_factor = j.at("stress_d_factor").get<double>();
  return p;
}

}  // namespace

void save_checkpoint(const std::string& base, const solver::GalerkinState& s,
                     std::uint64_t seed, std::uint64_t realization) {
  const TorusGrid& g = s.grid();

  json header;
  header["format"] = "cnstn-checkpoint";
  header["version"] = 1;
  header["t"] = s.t;
  header["seed"] = seed;
  header["realization"] = realization;
  header["grid"] = json{{"dim", g.dim}, {"m", g.modes}, {"n", g.points}};
  header["params"] = params_to_json(s.params);
  json fields = json::array();
  fields.push_back("rho");
  for (int i = 0; i < g.dim; ++i) fields.push_back("u_" + std::to_string(i));
  header["fields"] = fields;
  header["layout"] =
      "full complex coefficient cube per field, row-major with axis 0 slowest, "
      "little-endian float64 real/imag pairs";
  header["sidecar"] = base + ".bin";

  std::ofstream jout(base + ".json");
  if (!jout) throw std::runtime_error("cannot write " + base + ".json");
  jout << header.dump(2) << "\n";

  std::ofstream bout(base + ".bin", std::ios::binary);
  if (!bout) throw std::runtime_error("cannot write " + base + ".bin");
  write_cube(bout, s.rho.coeffs());
  for (int i = 0; i < g.dim; ++i) write_cube(bout, s.u[i].coeffs());
  if (!bout) throw std::runtime_error("short write to " + base + ".bin");
}

Checkpoint load_checkpoint(const std::string& base) {
  std::ifstream jin(base + ".json");
  if (!jin) throw std::runtime_error("cannot read " + base + ".json");
  json header = json::parse(jin);
  if (header.at("format").get<std::string>() != "cnstn-checkpoint")
    throw std::runtime_error("not a checkpoint header: " + base + ".json");
  if (header.at("version").get<int>() != 1)
    throw std::runtime_error("unsupported checkpoint version");

  TorusGrid g(header.at("grid").at("dim").get<int>(), header.at("grid").at("m").get<int>(),
              header.at("grid").at("n").get<int>());
  solver::SchemeParams p = params_from_json(header.at("params"));

  Checkpoint cp{solver::GalerkinState(g, p), header.at("seed").get<std::uint64_t>(),
                header.at("realization").get<std::uint64_t>()};
  cp.state.t = header.at("t").get<double>();

  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + base + ".bin");
  read_cube(bin, cp.state.rho.coeffs_mut());
  for (int i = 0; i < g.dim; ++i) read_cube(bin, cp.state.u[i].coeffs_mut());
  if (!bin) throw std::runtime_error("checkpoint sidecar is too short: " + base + ".bin");
  bin.peek();
  if (!bin.eof()) throw std::runtime_error("checkpoint sidecar has trailing bytes");
  return cp;
}

}  // namespace cnstn::io
