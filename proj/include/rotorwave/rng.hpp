#pragma once

#include <cstdint>

// Counter-based random phases.  Every phase is a pure function of
// (master_seed, realization, state_index), so draws are reproducible
// independently of evaluation order and thread count.

namespace rotorwave {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kStateStride64 = 0xC2B2AE3D27D4EB4Full;

// SplitMix64 finalizer; bijective on 64-bit words
inline std::uint64_t mix64(std::uint64_t z) {
  z += kGolden64;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_word(std::uint64_t master_seed, std::uint64_t realization,
                                  std::uint64_t state_index) {
  std::uint64_t stream = mix64(master_seed + kGolden64 * (realization + 1));
  return mix64(stream + kStateStride64 * (state_index + 1));
}

// uniform in [0, 1) with 53-bit resolution
inline double uniform01(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// uniform phase in [0, 2*pi)
inline double random_phase(std::uint64_t master_seed, std::uint64_t realization,
                           std::uint64_t state_index) {
  return 6.283185307179586476925286766559 *
         uniform01(counter_word(master_seed, realization, state_index));
}

// derived seed for an independent sub-stream (batch scans, shuffles, ...)
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  return mix64(master_seed ^ (kStateStride64 * (tag + 1)));
}

}  // namespace rotorwave
