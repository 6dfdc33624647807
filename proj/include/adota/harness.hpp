#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adota/config.hpp"
#include "adota/metrics.hpp"

namespace adota {

/// Draw-count bookkeeping for one round, used by determinism tests.
struct RoundTrace {
    std::size_t fading_draws = 0;
    std::size_t interference_entries = 0;
};

struct RunResult {
    std::vector<MetricsRecord> records;
    bool diverged = false;
    std::uint64_t divergence_round = 0;
    std::vector<RoundTrace> traces;  // filled only when trace = true

    const MetricsRecord& final_record() const { return records.back(); }
};

/// Executes the full round loop: per-client gradients, fading draws, one
/// interference vector, OTA aggregation, server step, metric collection at
/// the configured cadence. Client gradients may be computed on `workers`
/// threads; per-(round, client) random streams and fixed-order reduction
/// keep the results byte-identical for any worker count.
RunResult run_simulation(const RunConfig& config, std::size_t workers = 1, bool trace = false);

/// Writes metrics.csv plus the resolved-config JSON sidecar under out_dir.
/// Returns the metrics path.
std::string write_run_outputs(const RunConfig& config, const RunResult& result,
                              const std::string& out_dir);

struct SweepRow {
    double value = 0.0;
    std::size_t seed_count = 0;
    double final_loss_mean = 0.0;
    double final_loss_std = 0.0;
    std::optional<double> final_accuracy_mean;
    std::optional<double> final_accuracy_std;
    double final_grad_norm_sq_mean = 0.0;
    double final_grad_norm_sq_std = 0.0;
    std::size_t diverged_runs = 0;
    std::vector<std::string> metrics_paths;  // one per seed, seed order
};

struct SweepTable {
    std::string axis;
    std::vector<SweepRow> rows;
};

/// Cross product of values x seeds, each an independent run_simulation.
/// Runs execute in parallel across up to `workers` threads; outputs land in
/// out_dir/run_<axis>=<value>_seed=<seed>/.
SweepTable run_sweep(const SweepSpec& spec, const std::string& out_dir, std::size_t workers = 1);

/// Summary CSV: axis value, seed count, mean/std of final loss, final
/// accuracy, final grad_norm_sq, diverged run count.
void write_sweep_summary(const SweepTable& table, const std::string& path);

/// Self-contained gnuplot script drawing loss-vs-round (and accuracy when
/// available) with one curve per axis value, referencing the per-run CSVs.
void emit_plot_script(const SweepTable& table, const std::string& path);

}  // namespace adota
