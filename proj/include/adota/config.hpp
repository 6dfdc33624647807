#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adota/channel.hpp"
#include "adota/optimizers.hpp"
#include "adota/tasks.hpp"

namespace adota {

struct DatasetSpec {
    std::string source = "synthetic_classification";  // or synthetic_regression | csv
    std::string path;                                  // csv only
    std::size_t train_samples = 1000;
    std::size_t test_samples = 0;
    std::size_t features = 10;
    int classes = 2;
    double class_spread = 1.0;
    double noise_std = 1.0;
};

struct TaskSpec {
    LossKind loss = LossKind::Quadratic;
    DatasetSpec dataset;
    std::size_t clients = 1;
    std::string partition = "iid";  // iid | dirichlet
    double dir = 0.1;
    std::size_t local_steps = 1;
    double local_eta = 0.01;
    std::size_t mlp_hidden = 4;
};

struct ChannelSpec {
    FadingModel fading = FadingModel::constant(1.0);
    InterferenceModel interference{1.5, 0.0, 1};  // dimension resolved from the task
};

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::AdaGradOTA;
    ServerHyperParams hp;
    bool alpha_exp_set = false;  // explicit alpha_exp in the config
    double v_init = 0.0;         // fill value for v_{-1}
    std::string w0_policy = "auto";  // auto | zeros | uniform
};

/// Full experiment description. A config JSON document with any unknown key
/// is rejected outright, naming the offending key path.
struct RunConfig {
    TaskSpec task;
    ChannelSpec channel;
    OptimizerSpec optimizer;
    std::uint64_t rounds = 100;
    std::size_t eval_every = 0;  // 0 = auto: 1 for T <= 500, else 5
    std::uint64_t seed = 0;
    std::string output = "out";
    bool allow_alpha_mismatch = false;

    /// Cadence actually used for metric collection.
    std::size_t resolved_eval_every() const {
        if (eval_every > 0) return eval_every;
        return rounds <= 500 ? 1 : 5;
    }

    /// Cross-field checks, including the tail-index/alpha_exp coupling.
    void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Fully resolved config + seed, written as the sidecar next to metrics.
std::string run_config_to_json(const RunConfig& config);

struct SweepSpec {
    RunConfig base;
    std::string axis;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
};

SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

/// Returns base with the named axis set to value. Throws ConfigError for an
/// unknown axis name.
RunConfig apply_axis(const RunConfig& base, const std::string& axis, double value);

/// Axis names accepted by apply_axis.
std::vector<std::string> sweepable_axes();

}  // namespace adota
