#pragma once

#include <cstdint>
#include <random>

namespace wmar {

/// Deterministic random source. Wraps std::mt19937_64 (whose output stream
/// is fixed by the standard) and derives uniform doubles from the raw
/// 64-bit output directly, so streams are reproducible across platforms
/// and standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace wmar
