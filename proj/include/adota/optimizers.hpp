#pragma once

#include <cstdint>

#include "adota/param_math.hpp"

namespace adota {

enum class OptimizerKind { AdaGradOTA, AdamOTA, FedAvgM };

const char* to_string(OptimizerKind kind);

struct ServerHyperParams {
    double eta = 0.1;        // learning rate, > 0
    double beta1 = 0.0;      // momentum, [0, 1)
    double beta2 = 0.9;      // accumulator EMA (Adam only), (0, 1)
    double epsilon = 1e-8;   // root regularizer, > 0
    double alpha_exp = 2.0;  // accumulator exponent / root, (1, 2]

    void validate(OptimizerKind kind) const;
};

/// Mutable server-side optimizer state. One logical owner per run; steps are
/// sequential by contract.
struct ServerState {
    OptimizerKind kind = OptimizerKind::AdaGradOTA;
    ParamVector w;       // global model w_t
    ParamVector delta;   // momentum buffer Delta_t
    ParamVector v;       // accumulator v_t (all-zero and unused for FedAvgM)
    std::uint64_t round = 0;

    static ServerState init(OptimizerKind kind, ParamVector w0, ParamVector v_init);

    void check_invariants() const;
};

/// Delta_t = beta1 * Delta_{t-1} + (1 - beta1) * g_t
ParamVector momentum_update(const ParamVector& delta_prev, const ParamVector& g, double beta1);

/// v_t = v_{t-1} + |Delta_t|^alpha (entrywise); nondecreasing in t.
ParamVector accumulate_adagrad(const ParamVector& v_prev, const ParamVector& delta, double alpha);

/// v_t = beta2 * v_{t-1} + (1 - beta2) * |Delta_t|^alpha (entrywise EMA).
ParamVector accumulate_adam(const ParamVector& v_prev, const ParamVector& delta, double alpha,
                            double beta2);

/// w_{t+1} = w_t - eta * Delta_t / (v_t + eps)^(1/alpha), entrywise division
/// and root. Throws DivergenceError on a non-finite result.
ParamVector apply_update(const ParamVector& w, const ParamVector& delta, const ParamVector& v,
                         double eta, double epsilon, double alpha);

/// One full server round: momentum, accumulator (by kind), model update,
/// round counter. FedAvgM skips the accumulator and steps by a constant eta.
void server_step(ServerState& state, const ServerHyperParams& hp, const ParamVector& g);

}  // namespace adota
