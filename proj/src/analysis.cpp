#include "adota/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "adota/param_math.hpp"

namespace adota {

void BoundInputs::validate() const {
    if (!(f0_minus_fstar >= 0.0)) throw std::invalid_argument("BoundInputs: f0_minus_fstar must be >= 0");
    if (!(L > 0.0)) throw std::invalid_argument("BoundInputs: L must be > 0");
    if (!(C >= 0.0)) throw std::invalid_argument("BoundInputs: C must be >= 0");
    if (!(G >= 0.0)) throw std::invalid_argument("BoundInputs: G must be >= 0");
    if (!(sigma_c >= 0.0)) throw std::invalid_argument("BoundInputs: sigma_c must be >= 0");
    if (N < 1) throw std::invalid_argument("BoundInputs: N must be >= 1");
    if (d < 1) throw std::invalid_argument("BoundInputs: d must be >= 1");
    if (!(eta > 0.0)) throw std::invalid_argument("BoundInputs: eta must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("BoundInputs: epsilon must be > 0");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("BoundInputs: beta2 must lie in (0, 1)");
    if (T < 1) throw std::invalid_argument("BoundInputs: T must be >= 1");
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::invalid_argument("BoundInputs: alpha must lie in (1, 2]");
}

double upsilon(const BoundInputs& in) {
    in.validate();
    const double a = in.alpha;
    const double fade2 = in.mu_c * in.mu_c + in.sigma_c * in.sigma_c;
    return 4.0 * in.G + std::pow(static_cast<double>(in.d), 1.0 - a / 2.0) *
                            std::pow(fade2, a / 2.0) * std::pow(in.C, a) /
                            std::pow(static_cast<double>(in.N), a / 2.0);
}

BoundBreakdown adagrad_bound_terms(const BoundInputs& in) {
    in.validate();
    if (!(in.mu_c > 1.0)) {
        throw std::invalid_argument(
            "adagrad_bound: denominator (mu_c - 1) must be positive; got mu_c = " +
            std::to_string(in.mu_c));
    }
    const double a = in.alpha;
    const double g = gamma_complement(a).gamma;
    const double T = static_cast<double>(in.T);
    const double U = upsilon(in);
    const double u_root = std::pow(U, 1.0 / a);
    const double t_root = std::pow(T, 1.0 / g);

    BoundBreakdown out;
    out.upsilon = U;
    out.initial_term = in.f0_minus_fstar * u_root / (in.eta * (in.mu_c - 1.0) * t_root);
    const double paren = std::pow(in.eta, a / g) * in.L / a + std::pow(in.eta, g / a) * in.L / g +
                         u_root + 1.0 / std::pow(in.epsilon, 1.0 / a);
    out.log_coefficient =
        paren * static_cast<double>(in.d) * u_root / (2.0 * (in.mu_c - 1.0) * t_root);
    out.log_factor = std::log1p(U * T / in.epsilon);
    out.bound = out.initial_term + out.log_coefficient * out.log_factor;
    return out;
}

double adagrad_bound(const BoundInputs& in) { return adagrad_bound_terms(in).bound; }

BoundBreakdown adam_bound_terms(const BoundInputs& in) {
    in.validate();
    if (!(in.mu_c + in.beta2 > 1.0)) {
        throw std::invalid_argument(
            "adam_bound: denominator (mu_c + beta2 - 1) must be positive; got mu_c + beta2 = " +
            std::to_string(in.mu_c + in.beta2));
    }
    const double a = in.alpha;
    const double g = gamma_complement(a).gamma;
    const double T = static_cast<double>(in.T);
    const double U = upsilon(in);
    const double u_root = std::pow(U, 1.0 / a);
    const double one_minus_b2 = 1.0 - in.beta2;
    const double denom = in.mu_c + in.beta2 - 1.0;

    BoundBreakdown out;
    out.upsilon = U;
    out.initial_term = in.f0_minus_fstar * u_root / (denom * in.eta * T);
    const double middle =
        (std::pow(one_minus_b2, 1.0 / g) * std::pow(in.eta, g) * in.L +
         g * std::pow(one_minus_b2, g - 2.0) * u_root) /
        (g * std::pow(one_minus_b2, g + 1.0 / g - 2.0));
    const double paren = std::pow(in.eta, a / g) * in.L / a + middle +
                         one_minus_b2 / std::pow(in.epsilon, 1.0 / a);
    out.log_coefficient = paren * static_cast<double>(in.d) * u_root / (2.0 * denom);
    out.log_factor = std::log1p(U / in.epsilon) / T - std::log(in.beta2);
    out.bound = out.initial_term + out.log_coefficient * out.log_factor;
    return out;
}

double adam_bound(const BoundInputs& in) { return adam_bound_terms(in).bound; }

std::size_t default_hill_k(std::size_t n) {
    return static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
}

TailEstimate estimate_tail_index(std::span<const double> samples, std::size_t k) {
    if (k < 2) throw std::invalid_argument("estimate_tail_index: k must be >= 2");
    if (samples.size() < 2 * k) {
        throw std::invalid_argument("estimate_tail_index: need at least 2k samples");
    }
    std::vector<double> mags(samples.size());
    std::transform(samples.begin(), samples.end(), mags.begin(),
                   [](double x) { return std::abs(x); });
    std::sort(mags.begin(), mags.end());

    const double threshold = mags[mags.size() - k - 1];  // (k+1)-th largest
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("estimate_tail_index: nonpositive tail threshold");
    }
    double log_sum = 0.0;
    for (std::size_t i = mags.size() - k; i < mags.size(); ++i) {
        log_sum += std::log(mags[i] / threshold);
    }
    if (!(log_sum > 0.0)) {
        throw std::invalid_argument("estimate_tail_index: degenerate order statistics");
    }

    TailEstimate est;
    est.raw = static_cast<double>(k) / log_sum;
    est.k = k;
    est.n = samples.size();
    est.in_range = est.raw > 1.0 && est.raw <= 2.0;
    est.alpha_hat = std::clamp(est.raw, std::nextafter(1.0, 2.0), 2.0);
    return est;
}

std::pair<double, double> lemma3_sides(std::span<const double> seq, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("lemma3_sides: epsilon must be > 0");
    double b = 0.0;
    double lhs = 0.0;
    for (double a : seq) {
        if (!(a >= 0.0)) throw std::invalid_argument("lemma3_sides: negative element");
        b += a;
        lhs += a / (b + epsilon);
    }
    return {lhs, std::log1p(b / epsilon)};
}

std::pair<double, double> lemma4_sides(std::span<const double> seq, double phi, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("lemma4_sides: epsilon must be > 0");
    if (!(phi > 0.0 && phi < 1.0)) {
        throw std::invalid_argument("lemma4_sides: phi must lie in the open interval (0, 1)");
    }
    double b = 0.0;
    double lhs = 0.0;
    for (double a : seq) {
        if (!(a >= 0.0)) throw std::invalid_argument("lemma4_sides: negative element");
        b = phi * b + (1.0 - phi) * a;
        lhs += a / (b + epsilon);
    }
    const double n = seq.empty() ? 0.0 : static_cast<double>(seq.size() - 1);
    const double rhs = std::log1p(b / epsilon) / (1.0 - phi) - n * std::log(phi) / (1.0 - phi);
    return {lhs, rhs};
}

}  // namespace adota
