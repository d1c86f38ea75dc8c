#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cityforge {

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Seed for one subsystem: splitmix64(master ^ fnv1a64(subsystem)).
/// Every consumer of randomness derives its own stream this way so that adding
/// draws in one subsystem never shifts another.
std::uint64_t derive_seed(std::uint64_t master, std::string_view subsystem) noexcept;

/// Deterministic generator. The engine is std::mt19937_64 (bit-exact by the
/// standard); the distributions are implemented here because the standard
/// library ones are not portable across implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller (no cached second value).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace cityforge
