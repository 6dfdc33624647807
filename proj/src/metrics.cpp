#include "adota/metrics.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adota {

namespace {

constexpr const char* kHeader =
    "round,global_train_loss,grad_norm_sq,test_accuracy,"
    "effective_step_min,effective_step_median,effective_step_max,diverged";

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string format_metrics_csv(std::span<const MetricsRecord> records) {
    std::string out(kHeader);
    out += '\n';
    for (const auto& r : records) {
        char head[24];
        std::snprintf(head, sizeof head, "%" PRIu64, r.round);
        out += head;
        out += ',';
        out += fmt_real(r.global_train_loss);
        out += ',';
        out += fmt_real(r.grad_norm_sq);
        out += ',';
        if (r.test_accuracy) out += fmt_real(*r.test_accuracy);
        out += ',';
        out += fmt_real(r.effective_step_min);
        out += ',';
        out += fmt_real(r.effective_step_median);
        out += ',';
        out += fmt_real(r.effective_step_max);
        out += ',';
        out += r.diverged ? '1' : '0';
        out += '\n';
    }
    return out;
}

void export_metrics(std::span<const MetricsRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_metrics: cannot open " + path);
    out << format_metrics_csv(records);
    if (!out) throw std::runtime_error("export_metrics: write failed for " + path);
}

std::vector<MetricsRecord> parse_metrics(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("parse_metrics: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::runtime_error("parse_metrics: bad header in " + path);
    }
    std::vector<MetricsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        // a trailing empty accuracy cell still splits into 8 fields
        if (cells.size() != 8) throw std::runtime_error("parse_metrics: bad row in " + path);
        MetricsRecord r;
        r.round = std::stoull(cells[0]);
        r.global_train_loss = std::stod(cells[1]);
        r.grad_norm_sq = std::stod(cells[2]);
        if (!cells[3].empty()) r.test_accuracy = std::stod(cells[3]);
        r.effective_step_min = std::stod(cells[4]);
        r.effective_step_median = std::stod(cells[5]);
        r.effective_step_max = std::stod(cells[6]);
        r.diverged = cells[7] == "1";
        records.push_back(r);
    }
    return records;
}

}  // namespace adota
