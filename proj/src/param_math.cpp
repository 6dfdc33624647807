#include "adota/param_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adota {

ParamVector::ParamVector(std::vector<double> coords) : coords_(std::move(coords)) {
    require_finite("ParamVector");
}

bool ParamVector::all_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(),
                       [](double x) { return std::isfinite(x); });
}

void ParamVector::require_finite(const char* context) const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (!std::isfinite(coords_[i])) {
            throw std::invalid_argument(std::string(context) + ": non-finite coordinate at index " +
                                        std::to_string(i));
        }
    }
}

namespace {

double sgn(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;  // keeps signed_power continuous at the origin
}

}  // namespace

ParamVector signed_power(const ParamVector& v, double p) {
    if (!std::isfinite(p) || p < 0.0) {
        throw std::invalid_argument("signed_power: exponent must be finite and >= 0");
    }
    v.require_finite("signed_power");
    ParamVector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out[i] = sgn(v[i]) * std::pow(std::abs(v[i]), p);
    }
    out.require_finite("signed_power output");
    return out;
}

ParamVector abs_power(const ParamVector& v, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw std::invalid_argument("abs_power: alpha must lie in (0, 2]");
    }
    v.require_finite("abs_power");
    ParamVector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out[i] = std::pow(std::abs(v[i]), alpha);
    }
    out.require_finite("abs_power output");
    return out;
}

double lp_norm(const ParamVector& v, double p) {
    if (std::isinf(p) && p > 0.0) {
        double m = 0.0;
        for (std::size_t i = 0; i < v.dim(); ++i) m = std::max(m, std::abs(v[i]));
        return m;
    }
    if (!(p >= 1.0)) {
        throw std::invalid_argument("lp_norm: p must be >= 1 (or kInfNorm)");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) m = std::max(m, std::abs(v[i]));
    if (m == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) {
        sum += std::pow(std::abs(v[i]) / m, p);
    }
    return m * std::pow(sum, 1.0 / p);
}

TailIndexPair gamma_complement(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0)) {
        throw std::invalid_argument("gamma_complement: alpha must lie in (1, 2]");
    }
    TailIndexPair pair{alpha, alpha / (alpha - 1.0)};
    if (std::abs(1.0 / pair.alpha + 1.0 / pair.gamma - 1.0) > 1e-12) {
        throw std::invalid_argument("gamma_complement: conjugate identity violated");
    }
    return pair;
}

double dot(const ParamVector& a, const ParamVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

ParamVector add(const ParamVector& a, const ParamVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("add: dimension mismatch");
    ParamVector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
    return out;
}

ParamVector sub(const ParamVector& a, const ParamVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("sub: dimension mismatch");
    ParamVector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
    return out;
}

ParamVector scale(const ParamVector& v, double s) {
    ParamVector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out[i] = s * v[i];
    return out;
}

void axpy(ParamVector& a, double s, const ParamVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < a.dim(); ++i) a[i] += s * b[i];
}

}  // namespace adota
