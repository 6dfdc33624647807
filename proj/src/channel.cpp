#include "adota/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace adota {

namespace {

// Rayleigh(sigma): mean = sigma*sqrt(pi/2), var = (2 - pi/2)*sigma^2.
double rayleigh_sigma_for_mean(double mean) { return mean * std::sqrt(2.0 / M_PI); }

double rayleigh_std_for_mean(double mean) {
    const double sigma = rayleigh_sigma_for_mean(mean);
    return sigma * std::sqrt(2.0 - M_PI / 2.0);
}

}  // namespace

FadingModel FadingModel::rayleigh(double mean) {
    FadingModel m{Kind::Rayleigh, mean, rayleigh_std_for_mean(mean)};
    m.validate();
    return m;
}

FadingModel FadingModel::constant(double mean) {
    FadingModel m{Kind::Constant, mean, 0.0};
    m.validate();
    return m;
}

FadingModel FadingModel::gaussian_truncated(double mean, double std) {
    FadingModel m{Kind::GaussianTruncated, mean, std};
    m.validate();
    return m;
}

void FadingModel::validate() const {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("FadingModel: mean must be finite and > 0");
    }
    if (!(std >= 0.0) || !std::isfinite(std)) {
        throw std::invalid_argument("FadingModel: std must be finite and >= 0");
    }
    switch (kind) {
        case Kind::Rayleigh:
            if (std::abs(std - rayleigh_std_for_mean(mean)) > 1e-9) {
                throw std::invalid_argument(
                    "FadingModel: Rayleigh (mean, std) violate the one-scale relation");
            }
            break;
        case Kind::Constant:
            if (std != 0.0) throw std::invalid_argument("FadingModel: Constant requires std = 0");
            break;
        case Kind::GaussianTruncated:
            break;
    }
}

void InterferenceModel::validate() const {
    if (!(tail_index > 1.0 && tail_index <= 2.0)) {
        throw std::invalid_argument("InterferenceModel: tail_index must lie in (1, 2]");
    }
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("InterferenceModel: scale must be finite and >= 0");
    }
    if (dimension < 1) throw std::invalid_argument("InterferenceModel: dimension must be >= 1");
}

double sample_fading(const FadingModel& model, RngStream& rng) {
    switch (model.kind) {
        case FadingModel::Kind::Constant:
            return model.mean;
        case FadingModel::Kind::Rayleigh: {
            const double sigma = rayleigh_sigma_for_mean(model.mean);
            return sigma * std::sqrt(-2.0 * std::log(rng.uniform01()));
        }
        case FadingModel::Kind::GaussianTruncated: {
            // Rejection below zero; parameters describe the untruncated law.
            for (int attempt = 0; attempt < 1000; ++attempt) {
                const double h = model.mean + model.std * rng.gaussian();
                if (h >= 0.0) return h;
            }
            throw std::runtime_error("sample_fading: truncated Gaussian rejection stalled");
        }
    }
    throw std::invalid_argument("sample_fading: invalid fading kind");
}

double sample_alpha_stable(double alpha, double scale, RngStream& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw std::invalid_argument("sample_alpha_stable: alpha must lie in (0, 2]");
    }
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("sample_alpha_stable: scale must be finite and >= 0");
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double theta = M_PI * (rng.uniform01() - 0.5);  // U(-pi/2, pi/2)
        if (alpha == 1.0) {
            return scale * std::tan(theta);
        }
        const double w = rng.exponential();
        const double x = std::sin(alpha * theta) / std::pow(std::cos(theta), 1.0 / alpha) *
                         std::pow(std::cos((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
        const double value = scale * x;
        if (std::isfinite(value)) return value;
        // cos(theta) underflow can produce inf/nan at the corners of the
        // (theta, w) square; redraw.
    }
    throw std::runtime_error("sample_alpha_stable: repeated non-finite draws");
}

ParamVector sample_interference(const InterferenceModel& model, RngStream& rng) {
    model.validate();
    ParamVector out(model.dimension);
    for (std::size_t i = 0; i < model.dimension; ++i) {
        out[i] = sample_alpha_stable(model.tail_index, model.scale, rng);
    }
    return out;
}

ParamVector ota_aggregate(std::span<const ParamVector> local_grads,
                          std::span<const double> fadings,
                          const ParamVector& noise,
                          std::size_t n_clients) {
    if (n_clients == 0) throw std::invalid_argument("ota_aggregate: N must be >= 1");
    if (local_grads.size() != n_clients || fadings.size() != n_clients) {
        throw std::invalid_argument("ota_aggregate: gradient/fading counts must equal N");
    }
    const std::size_t d = noise.dim();
    for (const auto& g : local_grads) {
        if (g.dim() != d) throw std::invalid_argument("ota_aggregate: dimension mismatch");
    }
    ParamVector out(d);
    for (std::size_t n = 0; n < n_clients; ++n) {
        axpy(out, fadings[n], local_grads[n]);
    }
    const double inv_n = 1.0 / static_cast<double>(n_clients);
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = out[i] * inv_n + noise[i];
    }
    return out;
}

}  // namespace adota
