#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mdslab {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Child seed for a named stream. All randomness in the library flows from a
// root seed through this function.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0) noexcept;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace mdslab
