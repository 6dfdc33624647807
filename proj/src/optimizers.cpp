#include "adota/optimizers.hpp"

#include <cmath>
#include <stdexcept>

#include "adota/errors.hpp"

namespace adota {

const char* to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::AdaGradOTA: return "adagrad_ota";
        case OptimizerKind::AdamOTA: return "adam_ota";
        case OptimizerKind::FedAvgM: return "fedavgm";
    }
    return "unknown";
}

void ServerHyperParams::validate(OptimizerKind kind) const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("ServerHyperParams: eta must be finite and > 0");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("ServerHyperParams: beta1 must lie in [0, 1)");
    }
    if (kind == OptimizerKind::AdamOTA && !(beta2 > 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("ServerHyperParams: beta2 must lie in (0, 1)");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("ServerHyperParams: epsilon must be finite and > 0");
    }
    if (kind != OptimizerKind::FedAvgM && !(alpha_exp > 1.0 && alpha_exp <= 2.0)) {
        throw std::invalid_argument("ServerHyperParams: alpha_exp must lie in (1, 2]");
    }
}

ServerState ServerState::init(OptimizerKind kind, ParamVector w0, ParamVector v_init) {
    ServerState s;
    s.kind = kind;
    const std::size_t d = w0.dim();
    if (v_init.dim() != d) throw std::invalid_argument("ServerState: v_init dimension mismatch");
    s.w = std::move(w0);
    s.delta = ParamVector(d);
    s.v = std::move(v_init);
    s.round = 0;
    s.check_invariants();
    return s;
}

void ServerState::check_invariants() const {
    if (delta.dim() != w.dim() || v.dim() != w.dim()) {
        throw std::invalid_argument("ServerState: w/delta/v dimensions must agree");
    }
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (!(v[i] >= 0.0)) {
            throw std::invalid_argument("ServerState: accumulator must be entrywise >= 0");
        }
    }
}

ParamVector momentum_update(const ParamVector& delta_prev, const ParamVector& g, double beta1) {
    if (delta_prev.dim() != g.dim()) {
        throw std::invalid_argument("momentum_update: dimension mismatch");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("momentum_update: beta1 must lie in [0, 1)");
    }
    ParamVector out(g.dim());
    for (std::size_t i = 0; i < g.dim(); ++i) {
        out[i] = beta1 * delta_prev[i] + (1.0 - beta1) * g[i];
    }
    return out;
}

ParamVector accumulate_adagrad(const ParamVector& v_prev, const ParamVector& delta, double alpha) {
    if (v_prev.dim() != delta.dim()) {
        throw std::invalid_argument("accumulate_adagrad: dimension mismatch");
    }
    ParamVector out(v_prev.dim());
    for (std::size_t i = 0; i < v_prev.dim(); ++i) {
        if (!(v_prev[i] >= 0.0)) {
            throw std::invalid_argument("accumulate_adagrad: v_prev must be entrywise >= 0");
        }
        out[i] = v_prev[i] + std::pow(std::abs(delta[i]), alpha);
    }
    return out;
}

ParamVector accumulate_adam(const ParamVector& v_prev, const ParamVector& delta, double alpha,
                            double beta2) {
    if (v_prev.dim() != delta.dim()) {
        throw std::invalid_argument("accumulate_adam: dimension mismatch");
    }
    if (!(beta2 > 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("accumulate_adam: beta2 must lie in (0, 1)");
    }
    ParamVector out(v_prev.dim());
    for (std::size_t i = 0; i < v_prev.dim(); ++i) {
        if (!(v_prev[i] >= 0.0)) {
            throw std::invalid_argument("accumulate_adam: v_prev must be entrywise >= 0");
        }
        out[i] = beta2 * v_prev[i] + (1.0 - beta2) * std::pow(std::abs(delta[i]), alpha);
    }
    return out;
}

ParamVector apply_update(const ParamVector& w, const ParamVector& delta, const ParamVector& v,
                         double eta, double epsilon, double alpha) {
    const std::size_t d = w.dim();
    if (delta.dim() != d || v.dim() != d) {
        throw std::invalid_argument("apply_update: dimension mismatch");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("apply_update: epsilon must be > 0");
    ParamVector out(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!(v[i] >= 0.0)) {
            throw std::invalid_argument("apply_update: accumulator must be entrywise >= 0");
        }
        out[i] = w[i] - eta * delta[i] / std::pow(v[i] + epsilon, 1.0 / alpha);
        if (!std::isfinite(out[i])) {
            throw DivergenceError("apply_update: non-finite model coordinate", 0);
        }
    }
    return out;
}

void server_step(ServerState& state, const ServerHyperParams& hp, const ParamVector& g) {
    hp.validate(state.kind);
    if (g.dim() != state.w.dim()) throw std::invalid_argument("server_step: gradient dimension mismatch");

    state.delta = momentum_update(state.delta, g, hp.beta1);
    try {
        switch (state.kind) {
            case OptimizerKind::AdaGradOTA:
                state.v = accumulate_adagrad(state.v, state.delta, hp.alpha_exp);
                state.w = apply_update(state.w, state.delta, state.v, hp.eta, hp.epsilon, hp.alpha_exp);
                break;
            case OptimizerKind::AdamOTA:
                state.v = accumulate_adam(state.v, state.delta, hp.alpha_exp, hp.beta2);
                state.w = apply_update(state.w, state.delta, state.v, hp.eta, hp.epsilon, hp.alpha_exp);
                break;
            case OptimizerKind::FedAvgM: {
                ParamVector next = state.w;
                axpy(next, -hp.eta, state.delta);
                next.require_finite("server_step");
                state.w = std::move(next);
                break;
            }
        }
    } catch (const DivergenceError&) {
        throw DivergenceError("server_step: model diverged", state.round);
    } catch (const std::invalid_argument& e) {
        // non-finite momentum/accumulator from an extreme noise draw
        throw DivergenceError(std::string("server_step: ") + e.what(), state.round);
    }
    state.round += 1;
}

}  // namespace adota
