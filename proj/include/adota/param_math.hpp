#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace adota {

/// Dense real coordinate vector used for models, gradients, and optimizer
/// accumulators. All coordinates are required to be finite; operations that
/// would produce NaN/Inf throw instead of propagating.
class ParamVector {
public:
    ParamVector() = default;

    explicit ParamVector(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {}

    /// Takes ownership of raw coordinates; rejects non-finite entries.
    explicit ParamVector(std::vector<double> coords);

    std::size_t dim() const noexcept { return coords_.size(); }

    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }

    std::span<const double> coords() const noexcept { return coords_; }
    std::vector<double>& raw() noexcept { return coords_; }
    const std::vector<double>& raw() const noexcept { return coords_; }

    bool all_finite() const noexcept;

    /// Throws std::invalid_argument if any coordinate is non-finite.
    void require_finite(const char* context) const;

    bool operator==(const ParamVector& other) const noexcept { return coords_ == other.coords_; }

private:
    std::vector<double> coords_;
};

/// Sentinel accepted by lp_norm for the L-infinity norm.
inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Entrywise sign(v_i)*|v_i|^p with sign(0) = 0. Requires finite v and p >= 0.
ParamVector signed_power(const ParamVector& v, double p);

/// Entrywise |v_i|^alpha. Requires finite v and alpha in (0, 2].
ParamVector abs_power(const ParamVector& v, double alpha);

/// (sum |v_i|^p)^(1/p) for p >= 1, or max|v_i| for p = kInfNorm. The finite-p
/// path factors out max|v_i| before exponentiation so large p cannot overflow.
double lp_norm(const ParamVector& v, double p);

/// Tail index alpha in (1, 2] and its Holder conjugate gamma = alpha/(alpha-1).
struct TailIndexPair {
    double alpha;
    double gamma;
};

/// Builds the conjugate pair for alpha in (1, 2]; verifies 1/alpha + 1/gamma = 1
/// to within 1e-12.
TailIndexPair gamma_complement(double alpha);

// Plain vector algebra shared by the channel and optimizer modules.
double dot(const ParamVector& a, const ParamVector& b);
ParamVector add(const ParamVector& a, const ParamVector& b);
ParamVector sub(const ParamVector& a, const ParamVector& b);
ParamVector scale(const ParamVector& v, double s);
/// a += s * b
void axpy(ParamVector& a, double s, const ParamVector& b);

}  // namespace adota
