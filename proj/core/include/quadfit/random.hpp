#pragma once

#include <cstdint>
#include <random>

namespace quadfit {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent sub-seed for (stream, index). Replicate loops use this so that
/// their results do not depend on how work is split across threads.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

// Stream tags used by the library; tests may use any other value.
namespace streams {
inline constexpr std::uint64_t chi_star = 0x43485354;    // chi-star sampling
inline constexpr std::uint64_t bootstrap = 0x424f4f54;   // bootstrap replicates
inline constexpr std::uint64_t nystrom = 0x4e595354;     // Nystrom points
inline constexpr std::uint64_t monte_carlo = 0x4d434952; // MC integration
}  // namespace streams

}  // namespace quadfit
