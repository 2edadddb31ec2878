#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cnstn/noise.hpp"
#include "cnstn/solver.hpp"

namespace cnstn::config {

/// One trigonometric mode of an initial field: cos_amp cos(k.x) + sin_amp sin(k.x).
struct ModeAmp {
  std::array<int, 3> k{0, 0, 0};
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

struct FieldSpec {
  double mean = 0.0;
  std::vector<ModeAmp> modes;
};

struct QSpec {
  std::string kind = "constant";  // constant | streamfunction | components
  std::vector<std::vector<double>> vectors;          // constant
  std::vector<FieldSpec> streams;                    // streamfunction (2-d)
  std::vector<std::vector<FieldSpec>> components;    // components[k][axis]
};

struct NoiseSpec {
  std::string kind = "none";  // none | smooth | brownian
  int K = 0;
  QSpec q;
  std::uint64_t seed = 1;
  noise::SmoothDriverSpec smooth;  // used by kind == smooth
  int wz_level_lo = 4;
  int wz_level_hi = 8;
  double p = 2.5;  // rough-path exponent the remainder is judged against
};

/// Deliberate fault injection for exercising failure paths end to end.
/// Only tests set these; production configs leave the block absent.
struct TestHooks {
  bool corrupt_lift = false;            // roughcheck: perturb one second-level window
  bool identical_realizations = false;  // strat: give every path the same realization index
};

/// Parsed and validated run configuration.  Parsing is strict: unknown keys
/// anywhere in the document are rejected, so typos cannot silently fall back
/// to defaults.
struct RunConfig {
  int dim = 2;
  int m = 8;
  int n = 32;
  solver::SchemeParams params;
  FieldSpec rho0;
  std::vector<FieldSpec> u0;
  NoiseSpec noise;
  std::string experiment = "simulate";
  int stride = 0;  // 0: resolved to max(1, steps/256)
  int ensemble = 8;
  bool audit = true;
  std::string out;  // output directory; the CLI flag overrides
  bool informative = false;
  std::vector<std::string> scope_notes;  // expected-fail annotations in informative mode
  TestHooks hooks;

  int steps() const;
  int resolved_stride() const;
};

/// Parse strict JSON.  informative mode downgrades known-out-of-scope
/// combinations (e.g. Brownian driving with non-constant coefficients) from
/// errors to scope notes.
RunConfig parse_config(const std::string& text, bool informative = false);
RunConfig load_config_file(const std::string& path, bool informative = false);

/// Full resolved configuration (all defaults filled in) as a JSON document,
/// embedded in run summaries.
std::string resolved_json(const RunConfig& c);

ScalarField build_scalar(const FieldSpec& spec, const TorusGrid& g);
VectorField build_vector(const std::vector<FieldSpec>& spec, const TorusGrid& g);
noise::QField build_q(const NoiseSpec& spec, const TorusGrid& g);

/// The driver path for one realization: sampled Brownian increments for
/// kind == brownian, the closed-form smooth path for kind == smooth, an
/// empty path for kind == none.
noise::DriverPath build_driver(const NoiseSpec& spec, double T, int steps,
                               std::uint64_t realization);

}  // namespace cnstn::config
