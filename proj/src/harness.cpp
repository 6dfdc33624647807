#include "adota/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "adota/errors.hpp"
#include "adota/rng.hpp"

namespace adota {

namespace {

constexpr double kLossDivergenceCap = 1e12;

struct Instance {
    Dataset train;
    std::optional<Dataset> test;
    Partition partition;
    LossModel model;
};

LossModel build_model(const TaskSpec& task, const Dataset& train) {
    switch (task.loss) {
        case LossKind::Quadratic: return LossModel::quadratic(train.cols);
        case LossKind::LogisticRegression: return LossModel::logistic(train.cols);
        case LossKind::SoftmaxLinear:
            return LossModel::softmax_linear(train.cols,
                                             static_cast<std::size_t>(train.num_classes));
        case LossKind::SmallMLP:
            return LossModel::small_mlp({train.cols, task.mlp_hidden,
                                         static_cast<std::size_t>(train.num_classes)});
    }
    throw ConfigError("harness: unknown loss kind");
}

Dataset build_dataset(const DatasetSpec& spec, bool classification_needed, std::size_t samples,
                      RngStream& rng) {
    if (spec.source == "synthetic_classification") {
        return make_gaussian_mixture(samples, spec.features, spec.classes, spec.class_spread,
                                     spec.noise_std, rng);
    }
    if (spec.source == "synthetic_regression") {
        return make_linear_regression(samples, spec.features, spec.noise_std, rng);
    }
    return load_csv_dataset(spec.path, classification_needed);
}

Instance build_instance(const RunConfig& cfg) {
    const bool classification = cfg.task.loss != LossKind::Quadratic;
    const bool with_test = classification && cfg.task.dataset.test_samples > 0 &&
                           cfg.task.dataset.source != "csv";
    Instance inst;
    {
        // train and test come from one generator call so they share the same
        // mixture (same class means); the tail rows become the test split
        RngStream rng(cfg.seed, RngPurpose::DatasetTrain);
        const std::size_t total =
            cfg.task.dataset.train_samples + (with_test ? cfg.task.dataset.test_samples : 0);
        Dataset pool = build_dataset(cfg.task.dataset, classification, total, rng);
        if (with_test && pool.rows == total) {
            const std::size_t split = cfg.task.dataset.train_samples;
            Dataset test;
            test.cols = pool.cols;
            test.num_classes = pool.num_classes;
            test.rows = pool.rows - split;
            test.features.assign(pool.features.begin() + split * pool.cols, pool.features.end());
            test.labels.assign(pool.labels.begin() + split, pool.labels.end());
            pool.rows = split;
            pool.features.resize(split * pool.cols);
            pool.labels.resize(split);
            inst.test = std::move(test);
        }
        inst.train = std::move(pool);
    }
    if (classification && !inst.train.is_classification()) {
        throw ConfigError("harness: task needs a classification dataset");
    }

    RngStream part_rng(cfg.seed, RngPurpose::Partition);
    if (cfg.task.partition == "dirichlet") {
        if (!inst.train.is_classification()) {
            throw ConfigError("harness: dirichlet partition requires class labels; use iid");
        }
        inst.partition = dirichlet_partition(inst.train, cfg.task.clients, cfg.task.dir, part_rng);
    } else {
        inst.partition = iid_partition(inst.train.rows, cfg.task.clients, part_rng);
    }
    inst.model = build_model(cfg.task, inst.train);
    return inst;
}

ParamVector init_w0(const RunConfig& cfg, std::size_t d) {
    const bool uniform = cfg.optimizer.w0_policy == "uniform" ||
                         (cfg.optimizer.w0_policy == "auto" && cfg.task.loss == LossKind::SmallMLP);
    ParamVector w0(d);
    if (uniform) {
        RngStream rng(cfg.seed, RngPurpose::WeightInit);
        for (std::size_t i = 0; i < d; ++i) w0[i] = rng.uniform(-0.1, 0.1);
    }
    return w0;
}

void effective_step_stats(const ServerState& state, const ServerHyperParams& hp,
                          MetricsRecord& rec) {
    if (state.kind == OptimizerKind::FedAvgM) {
        rec.effective_step_min = rec.effective_step_median = rec.effective_step_max = hp.eta;
        return;
    }
    std::vector<double> steps(state.v.dim());
    for (std::size_t i = 0; i < state.v.dim(); ++i) {
        steps[i] = hp.eta / std::pow(state.v[i] + hp.epsilon, 1.0 / hp.alpha_exp);
    }
    std::sort(steps.begin(), steps.end());
    rec.effective_step_min = steps.front();
    rec.effective_step_max = steps.back();
    const std::size_t m = steps.size();
    rec.effective_step_median = (m % 2 == 1) ? steps[m / 2] : 0.5 * (steps[m / 2 - 1] + steps[m / 2]);
}

// Per-client gradients into fixed slots; reduction happens later in client
// order, so the result is independent of the worker count.
void compute_client_gradients(const Instance& inst, const ParamVector& w, const TaskSpec& task,
                              std::vector<ParamVector>& grads, std::size_t workers) {
    const std::size_t n = inst.partition.n_clients();
    grads.resize(n);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            grads[c] = client_update(inst.model, w, inst.train, inst.partition.assignments[c],
                                     task.local_steps, task.local_eta);
        }
    };
    if (workers <= 1 || n < 2) {
        worker(0, n);
        return;
    }
    const std::size_t used = std::min(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(used);
    const std::size_t chunk = (n + used - 1) / used;
    for (std::size_t t = 0; t < used; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg, std::size_t workers, bool trace) {
    cfg.validate();
    const Instance inst = build_instance(cfg);
    const std::size_t d = inst.model.dim();
    const std::size_t n_clients = inst.partition.n_clients();

    InterferenceModel interference = cfg.channel.interference;
    interference.dimension = d;
    interference.validate();

    ServerState state = ServerState::init(cfg.optimizer.kind, init_w0(cfg, d),
                                          ParamVector(d, cfg.optimizer.v_init));
    const ServerHyperParams& hp = cfg.optimizer.hp;
    const std::size_t cadence = cfg.resolved_eval_every();

    RunResult result;
    std::vector<ParamVector> grads;
    std::vector<double> fadings(n_clients);

    for (std::uint64_t t = 0; t < cfg.rounds; ++t) {
        compute_client_gradients(inst, state.w, cfg.task, grads, workers);

        const bool eval_round = (t % cadence == 0) || (t + 1 == cfg.rounds);
        MetricsRecord rec;
        if (eval_round) {
            rec.round = t;
            rec.global_train_loss = global_loss(inst.model, state.w, inst.train, inst.partition);
            ParamVector true_grad(d);
            for (const auto& g : grads) axpy(true_grad, 1.0, g);
            true_grad = scale(true_grad, 1.0 / static_cast<double>(n_clients));
            rec.grad_norm_sq = dot(true_grad, true_grad);
            if (inst.test) rec.test_accuracy = accuracy(inst.model, state.w, *inst.test);
            if (rec.global_train_loss > kLossDivergenceCap) {
                rec.diverged = true;
                result.records.push_back(rec);
                result.diverged = true;
                result.divergence_round = t;
                return result;
            }
        }

        for (std::size_t c = 0; c < n_clients; ++c) {
            RngStream rng(cfg.seed, RngPurpose::Fading, t, c);
            fadings[c] = sample_fading(cfg.channel.fading, rng);
        }
        RngStream noise_rng(cfg.seed, RngPurpose::Interference, t);
        const ParamVector noise = sample_interference(interference, noise_rng);
        if (trace) result.traces.push_back({fadings.size(), noise.dim()});

        try {
            const ParamVector g = ota_aggregate(grads, fadings, noise, n_clients);
            server_step(state, hp, g);
        } catch (const DivergenceError&) {
            if (!eval_round) {
                // force a record at the failing round so the divergence is visible
                rec.round = t;
                rec.global_train_loss = global_loss(inst.model, state.w, inst.train, inst.partition);
                ParamVector true_grad(d);
                for (const auto& g : grads) axpy(true_grad, 1.0, g);
                true_grad = scale(true_grad, 1.0 / static_cast<double>(n_clients));
                rec.grad_norm_sq = dot(true_grad, true_grad);
                if (inst.test) rec.test_accuracy = accuracy(inst.model, state.w, *inst.test);
            }
            rec.diverged = true;
            // no finite step was applied this round
            rec.effective_step_min = rec.effective_step_median = rec.effective_step_max = 0.0;
            result.records.push_back(rec);
            result.diverged = true;
            result.divergence_round = t;
            return result;
        }

        if (eval_round) {
            effective_step_stats(state, hp, rec);
            result.records.push_back(rec);
        }
    }
    return result;
}

std::string write_run_outputs(const RunConfig& cfg, const RunResult& result,
                              const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string metrics_path = out_dir + "/metrics.csv";
    export_metrics(result.records, metrics_path);
    std::ofstream side(out_dir + "/config.json", std::ios::binary);
    if (!side) throw std::runtime_error("write_run_outputs: cannot open sidecar");
    side << run_config_to_json(cfg);
    return metrics_path;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::string fmt_real17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec, const std::string& out_dir, std::size_t workers) {
    std::filesystem::create_directories(out_dir);

    struct Job {
        std::size_t row;
        std::size_t seed_idx;
        RunConfig cfg;
        std::string dir;
    };
    std::vector<Job> jobs;
    for (std::size_t r = 0; r < spec.values.size(); ++r) {
        for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
            RunConfig cfg = apply_axis(spec.base, spec.axis, spec.values[r]);
            cfg.seed = spec.seeds[s];
            const std::string dir = out_dir + "/run_" + spec.axis + "=" +
                                    format_value(spec.values[r]) + "_seed=" +
                                    std::to_string(spec.seeds[s]);
            jobs.push_back({r, s, std::move(cfg), dir});
        }
    }

    std::vector<RunResult> results(jobs.size());
    std::vector<std::string> paths(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size() || failed.load()) return;
            try {
                results[j] = run_simulation(jobs[j].cfg, 1);
                paths[j] = write_run_outputs(jobs[j].cfg, results[j], jobs[j].dir);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) failure = e.what();
                return;
            }
        }
    };
    const std::size_t used = std::max<std::size_t>(1, std::min(workers, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < used; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw std::runtime_error("run_sweep: " + failure);

    SweepTable table;
    table.axis = spec.axis;
    for (std::size_t r = 0; r < spec.values.size(); ++r) {
        SweepRow row;
        row.value = spec.values[r];
        row.seed_count = spec.seeds.size();
        std::vector<double> losses, accs, gnorms;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].row != r) continue;
            const MetricsRecord& fin = results[j].final_record();
            losses.push_back(fin.global_train_loss);
            gnorms.push_back(fin.grad_norm_sq);
            if (fin.test_accuracy) accs.push_back(*fin.test_accuracy);
            if (results[j].diverged) row.diverged_runs += 1;
            row.metrics_paths.push_back(paths[j]);
        }
        row.final_loss_mean = mean_of(losses);
        row.final_loss_std = sample_std(losses, row.final_loss_mean);
        row.final_grad_norm_sq_mean = mean_of(gnorms);
        row.final_grad_norm_sq_std = sample_std(gnorms, row.final_grad_norm_sq_mean);
        if (accs.size() == losses.size() && !accs.empty()) {
            row.final_accuracy_mean = mean_of(accs);
            row.final_accuracy_std = sample_std(accs, *row.final_accuracy_mean);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_sweep_summary(const SweepTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_sweep_summary: cannot open " + path);
    out << "axis,value,seed_count,final_loss_mean,final_loss_std,final_accuracy_mean,"
           "final_accuracy_std,final_grad_norm_sq_mean,final_grad_norm_sq_std,diverged_runs\n";
    for (const auto& row : table.rows) {
        out << table.axis << ',' << fmt_real17(row.value) << ',' << row.seed_count << ','
            << fmt_real17(row.final_loss_mean) << ',' << fmt_real17(row.final_loss_std) << ',';
        if (row.final_accuracy_mean) out << fmt_real17(*row.final_accuracy_mean);
        out << ',';
        if (row.final_accuracy_std) out << fmt_real17(*row.final_accuracy_std);
        out << ',' << fmt_real17(row.final_grad_norm_sq_mean) << ','
            << fmt_real17(row.final_grad_norm_sq_std) << ',' << row.diverged_runs << '\n';
    }
    if (!out) throw std::runtime_error("write_sweep_summary: write failed for " + path);
}

void emit_plot_script(const SweepTable& table, const std::string& path) {
    if (table.rows.empty()) throw std::invalid_argument("emit_plot_script: empty sweep table");
    for (const auto& row : table.rows) {
        if (row.metrics_paths.empty()) {
            throw std::invalid_argument("emit_plot_script: row without metrics files");
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot_script: cannot open " + path);

    const bool has_accuracy =
        std::all_of(table.rows.begin(), table.rows.end(),
                    [](const SweepRow& r) { return r.final_accuracy_mean.has_value(); });

    out << "# training curves, one per " << table.axis << " value (first seed of each)\n";
    out << "set datafile separator ','\n";
    out << "set key outside right\n";
    out << "set xlabel 'round'\n";
    out << "set terminal pngcairo size 960,640\n";
    out << "set ylabel 'global training loss'\n";
    out << "set output 'sweep_loss.png'\n";
    out << "plot \\\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out << "  '" << table.rows[i].metrics_paths.front() << "' every ::1 using 1:2 with lines "
            << "title '" << table.axis << "=" << format_value(table.rows[i].value) << "'";
        out << (i + 1 < table.rows.size() ? ", \\\n" : "\n");
    }
    if (has_accuracy) {
        out << "set ylabel 'test accuracy'\n";
        out << "set output 'sweep_accuracy.png'\n";
        out << "plot \\\n";
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            out << "  '" << table.rows[i].metrics_paths.front()
                << "' every ::1 using 1:4 with lines " << "title '" << table.axis << "="
                << format_value(table.rows[i].value) << "'";
            out << (i + 1 < table.rows.size() ? ", \\\n" : "\n");
        }
    }
    if (!out) throw std::runtime_error("emit_plot_script: write failed for " + path);
}

}  // namespace adota
