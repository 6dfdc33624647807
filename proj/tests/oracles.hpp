// Test-only oracles, deliberately independent of the library implementations
// they are used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oracles {

/// sign(x)*|x|^p through the exp/log route (the library uses std::pow).
inline double scalar_signed_power(double x, double p) {
    if (x == 0.0) return 0.0;
    const double mag = std::exp(p * std::log(std::abs(x)));
    return x > 0.0 ? mag : -mag;
}

inline double scalar_abs_power(double x, double p) {
    return x == 0.0 ? 0.0 : std::exp(p * std::log(std::abs(x)));
}

/// Central finite-difference gradient of f at w.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> w,
    double step) {
    std::vector<double> grad(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double keep = w[i];
        w[i] = keep + step;
        const double hi = f(w);
        w[i] = keep - step;
        const double lo = f(w);
        w[i] = keep;
        grad[i] = (hi - lo) / (2.0 * step);
    }
    return grad;
}

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size());
}

/// Kolmogorov-Smirnov statistic of xs against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

inline double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

inline double cauchy_cdf(double x, double scale) {
    return 0.5 + std::atan(x / scale) / M_PI;
}

/// Least-squares slope of y against x.
inline double regression_slope(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Long-double twin transcriptions of the convergence-rate formulas. Written
// from the formulas directly, with a different term decomposition than the
// library, to catch transcription slips.
// ---------------------------------------------------------------------------

struct BoundParams {
    long double f0, L, C, G, mu, sigma, N, d, eta, eps, beta2, T, alpha;
};

inline long double upsilon_hp(const BoundParams& p) {
    return 4.0L * p.G +
           std::pow(p.d, 1.0L - p.alpha / 2.0L) *
               std::pow(p.mu * p.mu + p.sigma * p.sigma, p.alpha / 2.0L) * std::pow(p.C, p.alpha) /
               std::pow(p.N, p.alpha / 2.0L);
}

inline long double adagrad_bound_hp(const BoundParams& p) {
    const long double gamma = p.alpha / (p.alpha - 1.0L);
    const long double ups = upsilon_hp(p);
    const long double denom = (p.mu - 1.0L) * std::pow(p.T, 1.0L / gamma);
    const long double first = p.f0 * std::pow(ups, 1.0L / p.alpha) / (p.eta * denom);
    const long double inner = std::pow(p.eta, p.alpha / gamma) * p.L / p.alpha +
                              std::pow(p.eta, gamma / p.alpha) * p.L / gamma +
                              std::pow(ups, 1.0L / p.alpha) + std::pow(p.eps, -1.0L / p.alpha);
    const long double second =
        inner * p.d * std::pow(ups, 1.0L / p.alpha) * std::log(1.0L + ups * p.T / p.eps) / (2.0L * denom);
    return first + second;
}

inline long double adam_bound_hp(const BoundParams& p) {
    const long double gamma = p.alpha / (p.alpha - 1.0L);
    const long double ups = upsilon_hp(p);
    const long double omb = 1.0L - p.beta2;
    const long double denom = p.mu + p.beta2 - 1.0L;
    const long double first = p.f0 * std::pow(ups, 1.0L / p.alpha) / (denom * p.eta * p.T);
    const long double mid_num =
        std::pow(omb, 1.0L / gamma) * std::pow(p.eta, gamma) * p.L + gamma * std::pow(omb, gamma - 2.0L) * std::pow(ups, 1.0L / p.alpha);
    const long double mid = mid_num / (gamma * std::pow(omb, gamma + 1.0L / gamma - 2.0L));
    const long double inner =
        std::pow(p.eta, p.alpha / gamma) * p.L / p.alpha + mid + omb * std::pow(p.eps, -1.0L / p.alpha);
    const long double factor = std::log(1.0L + ups / p.eps) / p.T - std::log(p.beta2);
    return first + inner * p.d * std::pow(ups, 1.0L / p.alpha) * factor / (2.0L * denom);
}

}  // namespace oracles
