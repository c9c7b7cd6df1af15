#pragma once

#include <cstdint>

namespace specprune {

/// Counter-based generator: draw n of stream s under seed k is
///
///   key  = mix64(k ^ mix64(s + 0x9E3779B97F4A7C15))
///   u64  = mix64(key + (n + 1) * 0x9E3779B97F4A7C15)
///
/// where mix64 is the SplitMix64 finaliser
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
///
/// Uniforms take the top 53 bits, normals use the cosine branch of Box-Muller
/// on two consecutive draws, exponentials are -log of a (0, 1] uniform. Ports
/// that follow this recipe reproduce every scene.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in (0, 1].
    double uniform_open_zero();
    /// Uniform integer in [0, bound), by rejection.
    std::uint64_t below(std::uint64_t bound);
    double normal();
    double exponential();

    std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

} // namespace specprune
