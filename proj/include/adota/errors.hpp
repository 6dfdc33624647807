#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace adota {

/// Invalid or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A model update produced a non-finite coordinate (or the loss exploded).
/// Carries the round at which the run fell over. CLI exit code 3.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::uint64_t round)
        : std::runtime_error(what + " (round " + std::to_string(round) + ")"), round_(round) {}

    std::uint64_t round() const noexcept { return round_; }

private:
    std::uint64_t round_;
};

}  // namespace adota
