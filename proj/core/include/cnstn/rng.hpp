#pragma once

#include <cstdint>

namespace cnstn::rng {

/// SplitMix64 finalizer: the standard 64-bit avalanche mix.
std::uint64_t mix64(std::uint64_t z);

/// Counter-based random stream keyed by (seed, realization, component).
/// Draw i of a stream is a pure function of (key, i), so Monte Carlo
/// realizations can be generated in any order — or on any thread — and
/// still reproduce bitwise.  The word function is SplitMix64 evaluated at
/// an arbitrary position, which passes standard statistical batteries and
/// is plenty for ensemble sizes in the 1e3..1e6 range used here.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t realization, std::uint64_t component);

  std::uint64_t word(std::uint64_t counter) const;
  /// uniform on (0,1]
  double uniform(std::uint64_t counter) const;
  /// standard Gaussian via Box-Muller on two words per counter
  double normal(std::uint64_t counter) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace cnstn::rng
