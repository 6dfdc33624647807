#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adota {

/// Per-round observables. grad_norm_sq is computed from the true
/// full-dataset gradient at w_t (not the noisy aggregate); test_accuracy is
/// present only for classification tasks with a test split.
struct MetricsRecord {
    std::uint64_t round = 0;
    double global_train_loss = 0.0;
    double grad_norm_sq = 0.0;
    std::optional<double> test_accuracy;
    double effective_step_min = 0.0;
    double effective_step_median = 0.0;
    double effective_step_max = 0.0;
    bool diverged = false;

    bool operator==(const MetricsRecord&) const = default;
};

/// Fixed column order, reals at 17 significant digits, byte-deterministic.
std::string format_metrics_csv(std::span<const MetricsRecord> records);

void export_metrics(std::span<const MetricsRecord> records, const std::string& path);

/// Inverse of export_metrics; parse(export(r)) == r.
std::vector<MetricsRecord> parse_metrics(const std::string& path);

}  // namespace adota
