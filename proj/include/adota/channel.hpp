#pragma once

#include <cstddef>
#include <span>

#include "adota/param_math.hpp"
#include "adota/rng.hpp"

namespace adota {

/// Per-client multiplicative channel gain. Rayleigh has a single free scale,
/// so (mean, std) are locked together; GaussianTruncated exists for analysis
/// sweeps that vary the spread independently of the mean.
struct FadingModel {
    enum class Kind { Rayleigh, Constant, GaussianTruncated };

    Kind kind = Kind::Constant;
    double mean = 1.0;
    double std = 0.0;

    static FadingModel rayleigh(double mean);
    static FadingModel constant(double mean);
    static FadingModel gaussian_truncated(double mean, double std);

    void validate() const;
};

/// Additive heavy-tailed interference at the server output: d i.i.d. entries
/// from a symmetric alpha-stable law. scale = 0 means a noiseless channel.
struct InterferenceModel {
    double tail_index = 1.5;  // alpha in (1, 2]
    double scale = 0.0;
    std::size_t dimension = 1;

    void validate() const;
};

/// One fading draw; always nonnegative for Rayleigh/Constant.
double sample_fading(const FadingModel& model, RngStream& rng);

/// One draw from the symmetric alpha-stable law S(alpha, beta=0, scale) via
/// the Chambers-Mallows-Stuck construction. alpha = 2 reduces to a Gaussian
/// with standard deviation scale*sqrt(2); alpha = 1 uses the analytic Cauchy
/// branch (supported for testing; the training path keeps alpha in (1, 2]).
double sample_alpha_stable(double alpha, double scale, RngStream& rng);

/// d i.i.d. symmetric alpha-stable entries at the configured scale.
ParamVector sample_interference(const InterferenceModel& model, RngStream& rng);

/// Noisy over-the-air aggregate: (1/N) * sum_n h_n * grad_n + noise.
/// Summation runs in fixed client order so results are bit-reproducible.
ParamVector ota_aggregate(std::span<const ParamVector> local_grads,
                          std::span<const double> fadings,
                          const ParamVector& noise,
                          std::size_t n_clients);

}  // namespace adota
