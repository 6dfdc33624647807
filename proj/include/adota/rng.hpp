#pragma once

#include <cstdint>
#include <random>

namespace adota {

/// Labels for independently derived random streams. Every consumer of
/// randomness gets its own stream keyed by (master seed, purpose, a, b),
/// so enabling client-level parallelism cannot reorder draws.
enum class RngPurpose : std::uint64_t {
    DatasetTrain = 1,  // one pool; the harness splits off the test rows
    Partition = 3,
    Fading = 4,        // a = round, b = client
    Interference = 5,  // a = round
    WeightInit = 6,
    Test = 100,
};

/// Stateless SplitMix64-style mixing of a key into a stream seed.
std::uint64_t derive_seed(std::uint64_t master, RngPurpose purpose,
                          std::uint64_t a = 0, std::uint64_t b = 0);

/// One deterministic random stream. The engine is std::mt19937_64, whose
/// output sequence is fixed by the standard, and all variate transforms are
/// implemented here explicitly, so identical seeds give bit-identical draws
/// on any conforming platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    RngStream(std::uint64_t master, RngPurpose purpose, std::uint64_t a = 0, std::uint64_t b = 0)
        : engine_(derive_seed(master, purpose, a, b)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform01();

    /// Uniform on (lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (two uniforms per call, no cached spare).
    double gaussian();

    /// Exponential with unit rate.
    double exponential();

private:
    std::mt19937_64 engine_;
};

}  // namespace adota
