#include "adota/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adota/errors.hpp"

namespace adota {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("config: unknown key '" + where + "." + item.key() + "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T def) {
    if (!obj.contains(key)) return def;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "'");
    }
}

LossKind parse_loss_kind(const std::string& s) {
    if (s == "quadratic") return LossKind::Quadratic;
    if (s == "logistic") return LossKind::LogisticRegression;
    if (s == "softmax_linear") return LossKind::SoftmaxLinear;
    if (s == "small_mlp") return LossKind::SmallMLP;
    throw ConfigError("config: unknown loss kind '" + s + "'");
}

OptimizerKind parse_optimizer_kind(const std::string& s) {
    if (s == "adagrad_ota") return OptimizerKind::AdaGradOTA;
    if (s == "adam_ota") return OptimizerKind::AdamOTA;
    if (s == "fedavgm") return OptimizerKind::FedAvgM;
    throw ConfigError("config: unknown optimizer kind '" + s + "'");
}

FadingModel parse_fading(const json& obj) {
    require_keys(obj, "channel.fading", {"kind", "mean", "std"});
    const std::string kind = get_or<std::string>(obj, "kind", "constant");
    const double mean = get_or<double>(obj, "mean", 1.0);
    try {
        if (kind == "rayleigh") {
            FadingModel m = FadingModel::rayleigh(mean);
            if (obj.contains("std")) {
                m.std = obj.at("std").get<double>();
                m.validate();  // must satisfy the one-scale relation
            }
            return m;
        }
        if (kind == "constant") {
            FadingModel m = FadingModel::constant(mean);
            if (obj.contains("std") && obj.at("std").get<double>() != 0.0) {
                throw ConfigError("config: constant fading requires std = 0");
            }
            return m;
        }
        if (kind == "gaussian_truncated") {
            if (!obj.contains("std")) {
                throw ConfigError("config: gaussian_truncated fading requires 'std'");
            }
            return FadingModel::gaussian_truncated(mean, obj.at("std").get<double>());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: channel.fading: ") + e.what());
    }
    throw ConfigError("config: unknown fading kind '" + kind + "'");
}

DatasetSpec parse_dataset(const json& obj) {
    require_keys(obj, "task.dataset",
                 {"source", "path", "train_samples", "test_samples", "features", "classes",
                  "class_spread", "noise_std"});
    DatasetSpec ds;
    ds.source = get_or<std::string>(obj, "source", ds.source);
    if (ds.source != "synthetic_classification" && ds.source != "synthetic_regression" &&
        ds.source != "csv") {
        throw ConfigError("config: unknown dataset source '" + ds.source + "'");
    }
    ds.path = get_or<std::string>(obj, "path", ds.path);
    ds.train_samples = get_or<std::size_t>(obj, "train_samples", ds.train_samples);
    ds.test_samples = get_or<std::size_t>(obj, "test_samples", ds.test_samples);
    ds.features = get_or<std::size_t>(obj, "features", ds.features);
    ds.classes = get_or<int>(obj, "classes", ds.classes);
    ds.class_spread = get_or<double>(obj, "class_spread", ds.class_spread);
    ds.noise_std = get_or<double>(obj, "noise_std", ds.noise_std);
    if (ds.source == "csv" && ds.path.empty()) {
        throw ConfigError("config: csv dataset requires 'path'");
    }
    return ds;
}

TaskSpec parse_task(const json& obj) {
    require_keys(obj, "task",
                 {"loss", "dataset", "clients", "partition", "dir", "local_steps", "local_eta",
                  "mlp_hidden"});
    TaskSpec t;
    t.loss = parse_loss_kind(get_or<std::string>(obj, "loss", "quadratic"));
    if (obj.contains("dataset")) t.dataset = parse_dataset(obj.at("dataset"));
    t.clients = get_or<std::size_t>(obj, "clients", t.clients);
    t.partition = get_or<std::string>(obj, "partition", t.partition);
    if (t.partition != "iid" && t.partition != "dirichlet") {
        throw ConfigError("config: partition must be 'iid' or 'dirichlet'");
    }
    t.dir = get_or<double>(obj, "dir", t.dir);
    t.local_steps = get_or<std::size_t>(obj, "local_steps", t.local_steps);
    t.local_eta = get_or<double>(obj, "local_eta", t.local_eta);
    t.mlp_hidden = get_or<std::size_t>(obj, "mlp_hidden", t.mlp_hidden);
    return t;
}

ChannelSpec parse_channel(const json& obj) {
    require_keys(obj, "channel", {"fading", "interference"});
    ChannelSpec c;
    if (obj.contains("fading")) c.fading = parse_fading(obj.at("fading"));
    if (obj.contains("interference")) {
        const json& i = obj.at("interference");
        require_keys(i, "channel.interference", {"tail_index", "scale"});
        c.interference.tail_index = get_or<double>(i, "tail_index", c.interference.tail_index);
        c.interference.scale = get_or<double>(i, "scale", c.interference.scale);
    }
    return c;
}

OptimizerSpec parse_optimizer(const json& obj, const ChannelSpec& channel) {
    require_keys(obj, "optimizer",
                 {"kind", "eta", "beta1", "beta2", "epsilon", "alpha_exp", "v_init", "w0"});
    OptimizerSpec o;
    o.kind = parse_optimizer_kind(get_or<std::string>(obj, "kind", "adagrad_ota"));
    o.hp.eta = get_or<double>(obj, "eta", o.hp.eta);
    o.hp.beta1 = get_or<double>(obj, "beta1", o.hp.beta1);
    o.hp.beta2 = get_or<double>(obj, "beta2", o.hp.beta2);
    o.hp.epsilon = get_or<double>(obj, "epsilon", o.hp.epsilon);
    if (obj.contains("alpha_exp")) {
        o.hp.alpha_exp = obj.at("alpha_exp").get<double>();
        o.alpha_exp_set = true;
    } else {
        o.hp.alpha_exp = channel.interference.tail_index;
    }
    o.v_init = get_or<double>(obj, "v_init", o.v_init);
    o.w0_policy = get_or<std::string>(obj, "w0", o.w0_policy);
    if (o.w0_policy != "auto" && o.w0_policy != "zeros" && o.w0_policy != "uniform") {
        throw ConfigError("config: optimizer.w0 must be auto|zeros|uniform");
    }
    return o;
}

RunConfig parse_run_json(const json& root) {
    require_keys(root, "<root>",
                 {"task", "channel", "optimizer", "rounds", "eval_every", "seed", "output",
                  "allow_alpha_mismatch"});
    RunConfig cfg;
    if (root.contains("task")) cfg.task = parse_task(root.at("task"));
    if (root.contains("channel")) cfg.channel = parse_channel(root.at("channel"));
    if (root.contains("optimizer")) cfg.optimizer = parse_optimizer(root.at("optimizer"), cfg.channel);
    cfg.rounds = get_or<std::uint64_t>(root, "rounds", cfg.rounds);
    cfg.eval_every = get_or<std::size_t>(root, "eval_every", cfg.eval_every);
    cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed);
    cfg.output = get_or<std::string>(root, "output", cfg.output);
    cfg.allow_alpha_mismatch = get_or<bool>(root, "allow_alpha_mismatch", cfg.allow_alpha_mismatch);
    cfg.validate();
    return cfg;
}

}  // namespace

void RunConfig::validate() const {
    if (rounds < 1) throw ConfigError("config: rounds must be >= 1");
    if (task.clients < 1) throw ConfigError("config: task.clients must be >= 1");
    try {
        channel.fading.validate();
        if (!(channel.interference.tail_index > 1.0 && channel.interference.tail_index <= 2.0)) {
            throw std::invalid_argument("interference tail_index must lie in (1, 2]");
        }
        if (!(channel.interference.scale >= 0.0)) {
            throw std::invalid_argument("interference scale must be >= 0");
        }
        optimizer.hp.validate(optimizer.kind);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (optimizer.v_init < 0.0) throw ConfigError("config: optimizer.v_init must be >= 0");
    if (optimizer.kind != OptimizerKind::FedAvgM && !allow_alpha_mismatch &&
        optimizer.hp.alpha_exp != channel.interference.tail_index) {
        throw ConfigError(
            "config: optimizer.alpha_exp differs from channel.interference.tail_index; pass "
            "allow_alpha_mismatch to run the ablation");
    }
    if (task.partition == "dirichlet" && !(task.dir > 0.0)) {
        throw ConfigError("config: task.dir must be > 0");
    }
    if (task.loss != LossKind::Quadratic && task.dataset.source == "synthetic_regression") {
        throw ConfigError("config: classification losses need a classification dataset");
    }
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_run_json(root);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& c) {
    json root;
    root["task"]["loss"] = to_string(c.task.loss);
    json& ds = root["task"]["dataset"];
    ds["source"] = c.task.dataset.source;
    if (!c.task.dataset.path.empty()) ds["path"] = c.task.dataset.path;
    ds["train_samples"] = c.task.dataset.train_samples;
    ds["test_samples"] = c.task.dataset.test_samples;
    ds["features"] = c.task.dataset.features;
    ds["classes"] = c.task.dataset.classes;
    ds["class_spread"] = c.task.dataset.class_spread;
    ds["noise_std"] = c.task.dataset.noise_std;
    root["task"]["clients"] = c.task.clients;
    root["task"]["partition"] = c.task.partition;
    root["task"]["dir"] = c.task.dir;
    root["task"]["local_steps"] = c.task.local_steps;
    root["task"]["local_eta"] = c.task.local_eta;
    root["task"]["mlp_hidden"] = c.task.mlp_hidden;

    json& fading = root["channel"]["fading"];
    switch (c.channel.fading.kind) {
        case FadingModel::Kind::Rayleigh: fading["kind"] = "rayleigh"; break;
        case FadingModel::Kind::Constant: fading["kind"] = "constant"; break;
        case FadingModel::Kind::GaussianTruncated: fading["kind"] = "gaussian_truncated"; break;
    }
    fading["mean"] = c.channel.fading.mean;
    fading["std"] = c.channel.fading.std;
    root["channel"]["interference"]["tail_index"] = c.channel.interference.tail_index;
    root["channel"]["interference"]["scale"] = c.channel.interference.scale;

    root["optimizer"]["kind"] = to_string(c.optimizer.kind);
    root["optimizer"]["eta"] = c.optimizer.hp.eta;
    root["optimizer"]["beta1"] = c.optimizer.hp.beta1;
    root["optimizer"]["beta2"] = c.optimizer.hp.beta2;
    root["optimizer"]["epsilon"] = c.optimizer.hp.epsilon;
    root["optimizer"]["alpha_exp"] = c.optimizer.hp.alpha_exp;
    root["optimizer"]["v_init"] = c.optimizer.v_init;
    root["optimizer"]["w0"] = c.optimizer.w0_policy;

    root["rounds"] = c.rounds;
    root["eval_every"] = c.eval_every;
    root["seed"] = c.seed;
    root["output"] = c.output;
    root["allow_alpha_mismatch"] = c.allow_alpha_mismatch;
    return root.dump(2) + "\n";
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sweep config: JSON parse error: ") + e.what());
    }
    require_keys(root, "<root>", {"base", "axis", "values", "seeds"});
    if (!root.contains("base") || !root.contains("axis") || !root.contains("values")) {
        throw ConfigError("sweep config: requires 'base', 'axis', and 'values'");
    }
    SweepSpec spec;
    spec.base = parse_run_json(root.at("base"));
    spec.axis = root.at("axis").get<std::string>();
    spec.values = root.at("values").get<std::vector<double>>();
    if (spec.values.empty()) throw ConfigError("sweep config: 'values' must be nonempty");
    if (root.contains("seeds")) {
        spec.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
        // five seeds per sweep point by default, counting up from the base seed
        for (std::uint64_t s = 0; s < 5; ++s) spec.seeds.push_back(spec.base.seed + s);
    }
    if (spec.seeds.empty()) throw ConfigError("sweep config: 'seeds' must be nonempty");
    // reject unknown axis names up front
    apply_axis(spec.base, spec.axis, spec.values.front());
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

std::vector<std::string> sweepable_axes() {
    return {"channel.tail_index", "channel.scale",   "channel.fading_mean", "task.clients",
            "task.dir",           "optimizer.eta",   "optimizer.beta1",     "optimizer.beta2",
            "optimizer.epsilon",  "optimizer.alpha_exp", "rounds"};
}

RunConfig apply_axis(const RunConfig& base, const std::string& axis, double value) {
    RunConfig cfg = base;
    if (axis == "channel.tail_index") {
        cfg.channel.interference.tail_index = value;
        if (!cfg.optimizer.alpha_exp_set) cfg.optimizer.hp.alpha_exp = value;
    } else if (axis == "channel.scale") {
        cfg.channel.interference.scale = value;
    } else if (axis == "channel.fading_mean") {
        switch (cfg.channel.fading.kind) {
            case FadingModel::Kind::Rayleigh: cfg.channel.fading = FadingModel::rayleigh(value); break;
            case FadingModel::Kind::Constant: cfg.channel.fading = FadingModel::constant(value); break;
            case FadingModel::Kind::GaussianTruncated:
                cfg.channel.fading = FadingModel::gaussian_truncated(value, cfg.channel.fading.std);
                break;
        }
    } else if (axis == "task.clients") {
        cfg.task.clients = static_cast<std::size_t>(value);
    } else if (axis == "task.dir") {
        cfg.task.dir = value;
    } else if (axis == "optimizer.eta") {
        cfg.optimizer.hp.eta = value;
    } else if (axis == "optimizer.beta1") {
        cfg.optimizer.hp.beta1 = value;
    } else if (axis == "optimizer.beta2") {
        cfg.optimizer.hp.beta2 = value;
    } else if (axis == "optimizer.epsilon") {
        cfg.optimizer.hp.epsilon = value;
    } else if (axis == "optimizer.alpha_exp") {
        cfg.optimizer.hp.alpha_exp = value;
        cfg.optimizer.alpha_exp_set = true;
    } else if (axis == "rounds") {
        cfg.rounds = static_cast<std::uint64_t>(value);
    } else {
        throw ConfigError("sweep config: unknown axis '" + axis + "'");
    }
    cfg.validate();
    return cfg;
}

}  // namespace adota
