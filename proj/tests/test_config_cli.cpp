#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnstn/config.hpp"
#include "cnstn/csv.hpp"
#include "cnstn/experiments.hpp"
#include "cnstn/hash.hpp"
#include "cnstn/noise.hpp"
#include "cnstn/spectral.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using namespace cnstn;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

json read_summary(const std::string& dir) {
  std::ifstream is(dir + "/summary.json");
  REQUIRE(is.good());
  json j;
  is >> j;
  return j;
}

bool parse_throws_containing(const std::string& text, const std::string& fragment) {
  try {
    config::parse_config(text);
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()).find(fragment) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_SUITE("config-cli") {
  TEST_CASE("a minimal configuration fills every default") {
    config::RunConfig c = config::parse_config(R"({"grid": {"m": 4}})");
    CHECK(c.dim == 2);
    CHECK(c.m == 4);
    CHECK(c.n == 16);  // defaults to 4m
    CHECK(c.params.dt == 1e-3);
    CHECK(c.params.T == 0.5);
    CHECK(c.params.gamma == 2.0);
    CHECK(c.params.m == 4);  // mirrored from the grid block
    CHECK(c.steps() == 500);
    CHECK(c.resolved_stride() == 1);
    CHECK(c.noise.kind == "none");
    CHECK(c.noise.K == 0);
    CHECK(c.noise.p == 2.5);
    CHECK(c.experiment == "simulate");
    CHECK(c.ensemble == 8);
    CHECK(c.audit);
    CHECK(!c.informative);
    CHECK(c.rho0.mean == 1.0);  // empty density spec becomes the unit state
    CHECK(c.u0.size() == 2);
    CHECK(c.scope_notes.empty());
  }

  TEST_CASE("the snapshot stride resolves to roughly 256 samples") {
    config::RunConfig c = config::parse_config(
        R"({"grid": {"m": 4}, "params": {"T": 1.024}})");
    CHECK(c.steps() == 1024);
    CHECK(c.resolved_stride() == 4);
    config::RunConfig e = config::parse_config(
        R"({"grid": {"m": 4}, "params": {"T": 1.024}, "stride": 7})");
    CHECK(e.resolved_stride() == 7);
  }

  TEST_CASE("physical parameter constraints are reported verbatim") {
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"grid": {"m": 4}, "params": {"gamma": 0.5}})"),
        "gamma must exceed N/2", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"grid": {"m": 4}, "params": {"gamma": 2.0, "beta": 3.0}})"),
        "beta must exceed max{4, gamma}", std::invalid_argument);
  }

  TEST_CASE("unknown keys are rejected wherever they appear") {
    CHECK(parse_throws_containing(R"({"grid": {"m": 4}, "foo": 1})", "unknown key \"foo\""));
    CHECK(parse_throws_containing(R"({"grid": {"m": 4, "cells": 32}})",
                                  "unknown key \"cells\""));
    CHECK(parse_throws_containing(
        R"({"grid": {"m": 4}, "params": {"viscosity": 0.1}})", "unknown key \"viscosity\""));
    CHECK(parse_throws_containing(
        R"({"grid": {"m": 4}, "noise": {"kind": "brownian", "K": 1, "q": {"kind": "constant", "vectors": [[1, 0]]}, "sigma": 2}})",
        "unknown key \"sigma\""));
  }

  TEST_CASE("malformed documents and grids are configuration errors") {
    CHECK(parse_throws_containing("{not json", "not valid JSON"));
    CHECK(parse_throws_containing(R"({"grid": {"m": 4, "n": 15}})", "must be even"));
    CHECK(parse_throws_containing(R"({"grid": {"m": 4, "n": 8}})", "at least 2m + 2"));
    CHECK(parse_throws_containing(R"({"grid": {"m": 4}, "params": {"dt": 3e-4}})",
                                  "dt must divide T"));
    CHECK(parse_throws_containing(
        R"({"grid": {"m": 4}, "noise": {"kind": "none", "K": 2}})", "kind none requires K = 0"));
    CHECK(parse_throws_containing(
        R"({"grid": {"m": 4}, "noise": {"kind": "brownian", "K": 1, "p": 3.5, "q": {"kind": "constant", "vectors": [[1, 0]]}}})",
        "must lie in (2, 3)"));
  }

  TEST_CASE("Brownian driving with varying coefficients is scope-checked") {
    const std::string text = R"({
      "grid": {"m": 4},
      "noise": {"kind": "brownian", "K": 1,
                "q": {"kind": "streamfunction",
                      "streams": [{"modes": [{"k": [1, 0], "cos": 1.0}]}]}}
    })";
    CHECK(parse_throws_containing(text, "brownian driving requires constant coefficients"));
    config::RunConfig c = config::parse_config(text, /*informative=*/true);
    REQUIRE(c.scope_notes.size() == 1);
    CHECK(c.scope_notes[0].find("informative only") != std::string::npos);
  }

  TEST_CASE("field specs build the trigonometric polynomial they describe") {
    TorusGrid g(2, 4, 12);
    config::FieldSpec spec;
    spec.mean = 1.0;
    spec.modes.push_back(config::ModeAmp{{1, 0, 0}, 0.25, 0.0});
    spec.modes.push_back(config::ModeAmp{{0, 2, 0}, 0.0, -0.5});
    ScalarField f = config::build_scalar(spec, g);
    ScalarField want = testutil::sample(g, [](const std::array<double, 3>& x) {
      return 1.0 + 0.25 * std::cos(x[0]) - 0.5 * std::sin(2.0 * x[1]);
    });
    CHECK(testutil::max_abs_diff(f, want) <= 1e-13);

    config::FieldSpec outside;
    outside.modes.push_back(config::ModeAmp{{7, 0, 0}, 1.0, 0.0});
    CHECK_THROWS_AS(config::build_scalar(outside, g), std::invalid_argument);
    CHECK_THROWS_AS(config::build_vector({spec}, g), std::invalid_argument);  // one axis missing
  }

  TEST_CASE("coefficient fields build by kind") {
    TorusGrid g(2, 4, 12);
    config::NoiseSpec off;
    CHECK(config::build_q(off, g).K() == 0);

    config::NoiseSpec cns;
    cns.kind = "brownian";
    cns.K = 2;
    cns.q.kind = "constant";
    cns.q.vectors = {{0.5, -0.25}, {0.0, 1.0}};
    noise::QField qc = config::build_q(cns, g);
    CHECK(qc.K() == 2);
    CHECK(qc.constant_in_space());
    CHECK(qc.vec(0)[1] == -0.25);

    config::NoiseSpec sns;
    sns.kind = "smooth";
    sns.K = 1;
    sns.q.kind = "streamfunction";
    config::FieldSpec psi;
    psi.modes.push_back(config::ModeAmp{{1, 0, 0}, 0.0, 1.0});  // sin(x1)
    sns.q.streams = {psi};
    noise::QField qs = config::build_q(sns, g);
    CHECK(qs.K() == 1);
    CHECK(!qs.constant_in_space());
    CHECK(qs.max_divergence() <= 1e-12);
  }

  TEST_CASE("driver construction follows the noise kind") {
    config::NoiseSpec off;
    noise::DriverPath none = config::build_driver(off, 0.5, 100, 0);
    CHECK(none.K() == 0);
    none.validate();

    config::NoiseSpec bro;
    bro.kind = "brownian";
    bro.K = 2;
    bro.seed = 77;
    noise::DriverPath b1 = config::build_driver(bro, 0.5, 64, 3);
    noise::DriverPath b2 = config::build_driver(bro, 0.5, 64, 3);
    noise::DriverPath b3 = config::build_driver(bro, 0.5, 64, 4);
    REQUIRE(b1.times.size() == 65);
    CHECK(b1.values.back()[0] == b2.values.back()[0]);
    CHECK(b1.values.back()[0] != b3.values.back()[0]);

    config::NoiseSpec smo;
    smo.kind = "smooth";
    smo.K = 1;
    smo.smooth.linear = {0.5};
    smo.smooth.waves = {{}};
    noise::DriverPath s = config::build_driver(smo, 1.0, 32, 0);
    CHECK(s.K() == 1);
    CHECK(std::abs(s.values.front()[0]) <= 1e-15);
    CHECK(std::abs(s.values.back()[0] - 0.5) <= 1e-12);
  }

  TEST_CASE("the resolved configuration echoes every effective value") {
    config::RunConfig c = config::parse_config(R"({"grid": {"m": 4}})");
    json j = json::parse(config::resolved_json(c));
    CHECK(j["grid"]["m"] == 4);
    CHECK(j["grid"]["n"] == 16);
    CHECK(j["params"]["dt"].get<double>() == 1e-3);
    CHECK(j["params"]["gamma"].get<double>() == 2.0);
    CHECK(j["steps"] == 500);
    CHECK(j["stride"] == 1);
    CHECK(j["noise"]["kind"] == "none");
    CHECK(j["ensemble"] == 8);
    CHECK(j["audit"] == true);
    CHECK(j["initial"]["rho"]["mean"].get<double>() == 1.0);
  }

  TEST_CASE("simulate runs a noise-free config end to end") {
    testutil::ScratchDir dir("cli_simulate");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.032, "epsilon": 1e-3},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("simulate", cfg, opts) == cli::kOk);
    CHECK(std::filesystem::exists(opts.out_dir + "/summary.json"));
    csv::Table traj = csv::read_table_file(opts.out_dir + "/trajectory.csv", "trajectory");
    CHECK(traj.rows.size() == 33);  // initial row plus one per step
    csv::read_table_file(opts.out_dir + "/ledger.csv", "ledger");
    CHECK(!std::filesystem::exists(opts.out_dir + "/driver.csv"));  // no noise, no path

    json s = read_summary(opts.out_dir);
    CHECK(s["command"] == "simulate");
    CHECK(s["outcome"]["completed"] == true);
    CHECK(s["outcome"]["audit"]["passed"] == true);
    CHECK(s["outcome"]["cfl_warning"] == false);
    CHECK(s["config_blob_hash"] == hash::git_blob_hash_file(cfg));
  }

  TEST_CASE("a density-floor breach aborts with the runtime exit code") {
    testutil::ScratchDir dir("cli_blowup");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.004, "density_floor": 0.9},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.2}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.2}]}, {}]}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("simulate", cfg, opts) == cli::kRuntimeAbort);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["completed"] == false);
    CHECK(s["outcome"]["blowup"]["min_rho"].get<double>() <= 0.9);
  }

  TEST_CASE("identical seeds reproduce run artifacts byte for byte") {
    testutil::ScratchDir dir("cli_determinism");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.016},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 11,
                "q": {"kind": "constant", "vectors": [[0.5, 0.3]]}}
    })");
    cli::Options a;
    a.out_dir = dir.file("out_a");
    cli::Options b;
    b.out_dir = dir.file("out_b");
    REQUIRE(cli::run_command("simulate", cfg, a) == cli::kOk);
    REQUIRE(cli::run_command("simulate", cfg, b) == cli::kOk);
    for (const char* leaf : {"/trajectory.csv", "/ledger.csv", "/driver.csv"})
      CHECK(hash::git_blob_hash_file(a.out_dir + leaf) ==
            hash::git_blob_hash_file(b.out_dir + leaf));

    cli::Options c;
    c.out_dir = dir.file("out_c");
    c.has_seed = true;
    c.seed = 999;  // flag overrides the config seed
    REQUIRE(cli::run_command("simulate", cfg, c) == cli::kOk);
    CHECK(hash::git_blob_hash_file(a.out_dir + "/driver.csv") !=
          hash::git_blob_hash_file(c.out_dir + "/driver.csv"));
  }

  TEST_CASE("bad input to the dispatcher maps to the config-error exit code") {
    testutil::ScratchDir dir("cli_badinput");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({"grid": {"m": 4}})");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("transmogrify", cfg, opts) == cli::kConfigError);
    const std::string broken = dir.file("broken.json");
    write_text(broken, "{this is not json");
    CHECK(cli::run_command("simulate", broken, opts) == cli::kConfigError);
    const std::string invalid = dir.file("invalid.json");
    write_text(invalid, R"({"grid": {"m": 4}, "params": {"gamma": 0.5}})");
    CHECK(cli::run_command("simulate", invalid, opts) == cli::kConfigError);
  }

  TEST_CASE("roughcheck flags an injected second-level corruption") {
    testutil::ScratchDir dir("cli_roughcheck_fault");
    const std::string cfg = dir.file("cfg.json");
    const std::string body = R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.032},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 7,
                "q": {"kind": "constant", "vectors": [[0.6, -0.2]]}},
      "test_hooks": {"corrupt_lift": true}
    )";
    write_text(cfg, body + "}");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("roughcheck", cfg, opts) == cli::kAuditFailure);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["corrupt_lift_hook"] == true);
    CHECK(s["outcome"]["chen_ok"] == false);
    CHECK(s["outcome"]["chen_defect"].get<double>() ==
          doctest::Approx(0.1).epsilon(1e-9));
    CHECK(std::filesystem::exists(opts.out_dir + "/remainder.csv"));

    // The same corruption with auditing off is reported but not fatal.
    const std::string cfg_soft = dir.file("cfg_soft.json");
    write_text(cfg_soft, body + ", \"audit\": false}");
    cli::Options soft;
    soft.out_dir = dir.file("out_soft");
    CHECK(cli::run_command("roughcheck", cfg_soft, soft) == cli::kOk);
    json s2 = read_summary(soft.out_dir);
    CHECK(s2["outcome"]["chen_ok"] == false);
    CHECK(s2["outcome"]["pass"] == false);
  }

  TEST_CASE("roughcheck reports the all-zero sentinel on a stationary run") {
    testutil::ScratchDir dir("cli_roughcheck_zero");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.032}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("roughcheck", cfg, opts) == cli::kOk);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["remainder_fit"]["exact"] == true);
    CHECK(s["outcome"]["scaling_pass"] == true);
    CHECK(s["outcome"]["chen_ok"] == true);
    CHECK(s["outcome"]["pass"] == true);
  }

  TEST_CASE("roughcheck rejects varying coefficients as out of scope") {
    testutil::ScratchDir dir("cli_roughcheck_scope");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.032},
      "noise": {"kind": "smooth", "K": 1,
                "q": {"kind": "streamfunction",
                      "streams": [{"modes": [{"k": [1, 0], "cos": 1.0}]}]}}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("roughcheck", cfg, opts) == cli::kConfigError);
  }

  TEST_CASE("the covariation ensemble flags wired-together realizations") {
    testutil::ScratchDir dir("cli_strat_degenerate");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.016},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 5,
                "q": {"kind": "constant", "vectors": [[0.5, 0.2]]}},
      "ensemble": 4,
      "test_hooks": {"identical_realizations": true}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("strat", cfg, opts) == cli::kAuditFailure);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["correction_identity"]["degenerate"] == true);
    CHECK(std::filesystem::exists(opts.out_dir + "/gaps.csv"));
    CHECK(std::filesystem::exists(opts.out_dir + "/noise_energy.csv"));
  }

  TEST_CASE("an honest small covariation ensemble clears the dispatcher") {
    testutil::ScratchDir dir("cli_strat_ok");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.016},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 5,
                "q": {"kind": "constant", "vectors": [[0.5, 0.2]]}},
      "ensemble": 6
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("strat", cfg, opts) == cli::kOk);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["correction_identity"]["degenerate"] == false);
    CHECK(s["outcome"]["energy_neutrality"]["divergence_free_q"] == true);
    CHECK(s["outcome"]["energy_neutrality"]["neutral"] == true);
  }

  TEST_CASE("informative mode demonstrates the pressure-divergence energy leak") {
    testutil::ScratchDir dir("cli_strat_informative");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.016},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 5,
                "q": {"kind": "components",
                      "components": [[{"modes": [{"k": [1, 0], "cos": 1.0}]}, {}]]}},
      "ensemble": 2
    })");
    cli::Options strict;
    strict.out_dir = dir.file("out_strict");
    CHECK(cli::run_command("strat", cfg, strict) == cli::kConfigError);

    cli::Options opts;
    opts.out_dir = dir.file("out");
    opts.informative = true;
    CHECK(cli::run_command("strat", cfg, opts) == cli::kOk);
    json s = read_summary(opts.out_dir);
    CHECK(s.contains("scope_notes"));
    CHECK(s["outcome"]["energy_neutrality"]["divergence_free_q"] == false);
    CHECK(s["outcome"]["energy_neutrality"]["expected_fail"] == true);
    CHECK(s["outcome"]["correction_identity"]["skipped"] == true);
  }

  TEST_CASE("mollified-driver comparison accepts a driver the solution never feels") {
    testutil::ScratchDir dir("cli_wz_zero");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.032},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 5,
                "q": {"kind": "constant", "vectors": [[0.0, 0.0]]},
                "wong_zakai_levels": [2, 4]}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("wongzakai", cfg, opts) == cli::kOk);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["distances_decreasing"] == true);
    CHECK(s["outcome"]["any_level_failed"] == false);
    csv::Table t = csv::read_table_file(opts.out_dir + "/wong_zakai.csv", "wong-zakai");
    REQUIRE(t.rows.size() == 3);  // levels 2, 3, 4
    for (const auto& row : t.rows) CHECK(row[3] == 0.0);  // bitwise-identical runs
  }

  TEST_CASE("mollified-driver comparison requires a Brownian driver") {
    testutil::ScratchDir dir("cli_wz_kind");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({"grid": {"m": 4, "n": 12}, "params": {"dt": 1e-3, "T": 0.032}})");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("wongzakai", cfg, opts) == cli::kConfigError);
    CHECK(cli::run_command("strat", cfg, opts) == cli::kConfigError);
  }

  TEST_CASE("the audit command emits the full diagnostic bundle") {
    testutil::ScratchDir dir("cli_audit");
    const std::string cfg = dir.file("cfg.json");
    write_text(cfg, R"({
      "grid": {"m": 4, "n": 12},
      "params": {"dt": 1e-3, "T": 0.032, "epsilon": 1e-3},
      "initial": {"rho": {"mean": 1.0, "modes": [{"k": [1, 0], "cos": 0.1}]},
                  "u": [{"modes": [{"k": [0, 1], "sin": 0.1}]}, {}]},
      "noise": {"kind": "brownian", "K": 1, "seed": 5,
                "q": {"kind": "constant", "vectors": [[0.5, 0.2]]}}
    })");
    cli::Options opts;
    opts.out_dir = dir.file("out");
    CHECK(cli::run_command("audit", cfg, opts) == cli::kOk);
    json s = read_summary(opts.out_dir);
    CHECK(s["outcome"]["audit"]["passed"] == true);
    CHECK(s["outcome"]["info"].contains("rho_log_rho_max_residual"));
    CHECK(s["outcome"]["info"].contains("pressure_weight"));
    CHECK(s["outcome"]["info"].contains("flux_pair"));
    CHECK(s["outcome"]["info"].contains("renormalized_balance_max_residual"));
    CHECK(s["outcome"]["info"]["renormalization_warning"] == false);
    bool saw_commutator = false;
    for (const auto& c : s["outcome"]["audit"]["checks"])
      if (c["name"] == "commutator_cancellation") {
        saw_commutator = true;
        CHECK(c["passed"] == true);
      }
    CHECK(saw_commutator);
  }
}
