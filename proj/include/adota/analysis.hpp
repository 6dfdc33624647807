#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace adota {

/// Constants feeding the closed-form convergence-rate evaluators.
struct BoundInputs {
    double f0_minus_fstar = 0.0;  // f(w_0) - f_*
    double L = 1.0;               // smoothness under the alpha-norm
    double C = 0.0;               // per-client gradient sup-norm bound
    double G = 0.0;               // interference alpha-th moment bound
    double mu_c = 1.0;            // fading mean
    double sigma_c = 0.0;         // fading std
    std::size_t N = 1;            // clients
    std::size_t d = 1;            // model dimension
    double eta = 0.1;
    double epsilon = 1e-8;
    double beta2 = 0.9;           // Adam only
    std::uint64_t T = 1;          // rounds
    double alpha = 2.0;           // tail index, (1, 2]

    void validate() const;
};

/// Composite fading/interference constant:
/// Upsilon = 4G + d^(1-alpha/2) * (mu_c^2 + sigma_c^2)^(alpha/2) * C^alpha / N^(alpha/2).
double upsilon(const BoundInputs& in);

struct BoundBreakdown {
    double upsilon = 0.0;
    double initial_term = 0.0;    // the f(w_0) - f_* additive term
    double log_coefficient = 0.0; // multiplier in front of the log factor
    double log_factor = 0.0;      // the log factor itself
    double bound = 0.0;
};

/// RHS of the AdaGrad-OTA convergence rate. Requires mu_c > 1; the rejection
/// diagnostic names the failing denominator.
double adagrad_bound(const BoundInputs& in);
BoundBreakdown adagrad_bound_terms(const BoundInputs& in);

/// RHS of the Adam-OTA convergence rate. Requires mu_c + beta2 > 1.
double adam_bound(const BoundInputs& in);
BoundBreakdown adam_bound_terms(const BoundInputs& in);

struct TailEstimate {
    double alpha_hat = 0.0;  // clamped to (1, 2]
    double raw = 0.0;        // unclamped Hill estimate
    bool in_range = true;    // raw already inside (1, 2]
    std::size_t k = 0;
    std::size_t n = 0;
};

/// Hill estimate of the tail index from the k largest |samples|. Requires
/// n >= 2k and k >= 2; rejects degenerate order statistics (all top values
/// equal to the threshold).
TailEstimate estimate_tail_index(std::span<const double> samples, std::size_t k);

/// Default Hill order-statistic count: floor(sqrt(n)).
std::size_t default_hill_k(std::size_t n);

/// Both sides of the cumulative-sum inequality
///   sum_j a_j / (b_j + eps) <= ln(1 + b_n / eps),   b_j = a_0 + ... + a_j.
std::pair<double, double> lemma3_sides(std::span<const double> seq, double epsilon);

/// Both sides of the EMA variant with b_j = (1-phi) * sum_{i<=j} phi^(j-i) a_i:
///   sum_j a_j / (b_j + eps) <= ln(1 + b_n/eps)/(1-phi) - n*ln(phi)/(1-phi).
std::pair<double, double> lemma4_sides(std::span<const double> seq, double phi, double epsilon);

}  // namespace adota
