#include "adota/rng.hpp"

#include <cmath>

namespace adota {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, RngPurpose purpose, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(master + kGolden * static_cast<std::uint64_t>(purpose));
    h = splitmix64(h + kGolden * a);
    h = splitmix64(h + kGolden * b);
    return h;
}

double RngStream::uniform01() {
    // 53 random bits, centered in the cell: lands strictly inside (0, 1).
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RngStream::exponential() {
    return -std::log(uniform01());
}

}  // namespace adota
