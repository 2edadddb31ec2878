#pragma once

#include <cstdint>
#include <string>

#include "cnstn/config.hpp"

namespace cnstn::cli {

/// Exit codes shared by every subcommand: 0 success, 1 configuration or
/// usage error, 2 runtime abort (density floor, solver breakdown), 3 audit
/// failure.
enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeAbort = 2, kAuditFailure = 3 };

struct Options {
  std::string out_dir;  // empty: config "out", else "."
  bool has_seed = false;
  std::uint64_t seed = 0;    // overrides the config seed
  bool informative = false;  // downgrade scope violations to annotations
  int workers = 0;           // 0: CNSTN_WORKERS env var, else 1
  std::string config_hash;   // git blob hash of the configuration text, for summaries
};

int cmd_simulate(const config::RunConfig& cfg, const Options& opts);
int cmd_wongzakai(const config::RunConfig& cfg, const Options& opts);
int cmd_roughcheck(const config::RunConfig& cfg, const Options& opts);
int cmd_strat(const config::RunConfig& cfg, const Options& opts);
int cmd_audit(const config::RunConfig& cfg, const Options& opts);

/// Load the configuration file and dispatch; maps exceptions to exit codes
/// and prints the reason to stderr.
int run_command(const std::string& command, const std::string& config_path,
                const Options& opts);

}  // namespace cnstn::cli
