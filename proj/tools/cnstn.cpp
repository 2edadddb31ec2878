// Command-line front end: compressible flow runs driven by rough or smooth
// paths, plus the audit/diagnostic batteries.  Every subcommand reads one
// JSON config and writes CSV artifacts plus a summary.json into --out.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime abort (density
// floor, solver failure), 3 audit failure (a requested check did not hold).

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cnstn/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral compressible-flow simulator with rough-path drivers"};
  app.require_subcommand(1);

  std::string config_path;
  cnstn::cli::Options opts;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", opts.out_dir, "output directory (default from config)");
    sub->add_option("--seed", seed, "override the driver seed");
    sub->add_flag("--informative", opts.informative,
                  "downgrade out-of-scope config combinations to notes");
    sub->add_option("--workers", opts.workers, "worker threads for ensembles");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "single forward run with ledgers");
  CLI::App* wongzakai =
      app.add_subcommand("wongzakai", "mollified-driver convergence toward a rough run");
  CLI::App* roughcheck =
      app.add_subcommand("roughcheck", "remainder scaling of the tested equation");
  CLI::App* strat = app.add_subcommand(
      "strat", "ensemble check of the Ito-Stratonovich correction identity");
  CLI::App* audit = app.add_subcommand("audit", "full conservation and budget battery");
  for (CLI::App* sub : {simulate, wongzakai, roughcheck, strat, audit}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : {simulate, wongzakai, roughcheck, strat, audit}) {
    if (sub->parsed()) {
      if (sub->count("--seed") > 0) {
        opts.has_seed = true;
        opts.seed = seed;
      }
      return cnstn::cli::run_command(sub->get_name(), config_path, opts);
    }
  }
  std::cerr << "no subcommand given\n";
  return cnstn::cli::kConfigError;
}
