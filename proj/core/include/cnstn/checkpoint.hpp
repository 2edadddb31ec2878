#pragma once

#include <cstdint>
#include <string>

#include "cnstn/solver.hpp"

namespace cnstn::io {

/// Write a state to <base>.json (human-readable header: parameters, time,
/// seed bookkeeping, field layout) plus <base>.bin (the raw coefficient
/// cubes: for each field the full complex cube row-major with axis 0
/// slowest, each coefficient as little-endian float64 real then imaginary).
/// Restarting from the pair is bit-exact: coefficients round-trip untouched.
void save_checkpoint(const std::string& base, const solver::GalerkinState& s,
                     std::uint64_t seed, std::uint64_t realization);

struct Checkpoint {
  solver::GalerkinState state;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
};

Checkpoint load_checkpoint(const std::string& base);

}  // namespace cnstn::io
