#include "cnstn/rng.hpp"

#include <cmath>
#include <numbers>

namespace cnstn::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t realization,
                             std::uint64_t component) {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k ^ (realization + kGolden));
  k = mix64(k ^ (component + 2 * kGolden));
  key_ = k;
}

std::uint64_t CounterStream::word(std::uint64_t counter) const {
  return mix64(key_ + counter * kGolden);
}

double CounterStream::uniform(std::uint64_t counter) const {
  return ((word(counter) >> 11) + 1) * 0x1.0p-53;  // (0,1], never 0
}

double CounterStream::normal(std::uint64_t counter) const {
  double u1 = ((word(2 * counter) >> 11) + 1) * 0x1.0p-53;
  double u2 = (word(2 * counter + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cnstn::rng
