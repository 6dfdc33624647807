#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adota/analysis.hpp"
#include "adota/channel.hpp"
#include "adota/config.hpp"
#include "adota/errors.hpp"
#include "adota/harness.hpp"
#include "adota/param_math.hpp"
#include "adota/rng.hpp"

namespace {

using adota::BoundInputs;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct BoundRequest {
    std::string theorem;
    BoundInputs inputs;
};

BoundRequest load_bound_request(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw adota::ConfigError("bound: cannot open " + path);
    json root;
    try {
        std::stringstream ss;
        ss << in.rdbuf();
        root = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw adota::ConfigError(std::string("bound: JSON parse error: ") + e.what());
    }
    const std::set<std::string> allowed = {"theorem", "f0_minus_fstar", "L", "C", "G",
                                           "mu_c",    "sigma_c",        "N", "d", "eta",
                                           "epsilon", "beta2",          "T", "alpha"};
    for (const auto& item : root.items()) {
        if (!allowed.count(item.key())) {
            throw adota::ConfigError("bound: unknown key '" + item.key() + "'");
        }
    }
    BoundRequest req;
    try {
        req.theorem = root.at("theorem").get<std::string>();
        BoundInputs& b = req.inputs;
        b.f0_minus_fstar = root.value("f0_minus_fstar", b.f0_minus_fstar);
        b.L = root.value("L", b.L);
        b.C = root.value("C", b.C);
        b.G = root.value("G", b.G);
        b.mu_c = root.value("mu_c", b.mu_c);
        b.sigma_c = root.value("sigma_c", b.sigma_c);
        b.N = root.value("N", b.N);
        b.d = root.value("d", b.d);
        b.eta = root.value("eta", b.eta);
        b.epsilon = root.value("epsilon", b.epsilon);
        b.beta2 = root.value("beta2", b.beta2);
        b.T = root.value("T", b.T);
        b.alpha = root.value("alpha", b.alpha);
    } catch (const json::exception& e) {
        throw adota::ConfigError(std::string("bound: bad field: ") + e.what());
    }
    if (req.theorem != "adagrad" && req.theorem != "adam") {
        throw adota::ConfigError("bound: theorem must be 'adagrad' or 'adam'");
    }
    return req;
}

int cmd_run(const std::string& config_path, std::uint64_t* seed_override,
            const std::string& out_override, std::size_t workers, bool allow_alpha_mismatch) {
    adota::RunConfig cfg = adota::load_run_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (!out_override.empty()) cfg.output = out_override;
    if (allow_alpha_mismatch) cfg.allow_alpha_mismatch = true;
    cfg.validate();

    const adota::RunResult result = adota::run_simulation(cfg, workers);
    const std::string metrics = adota::write_run_outputs(cfg, result, cfg.output);
    const auto& fin = result.final_record();
    std::cout << "rounds recorded: " << result.records.size() << "\n";
    std::cout << "final train loss: " << fin.global_train_loss << "\n";
    if (fin.test_accuracy) std::cout << "final test accuracy: " << *fin.test_accuracy << "\n";
    std::cout << "metrics: " << metrics << "\n";
    if (result.diverged) {
        std::cerr << "run diverged at round " << result.divergence_round << "\n";
        return kExitDiverged;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, std::size_t workers,
              bool allow_alpha_mismatch) {
    adota::SweepSpec spec = adota::load_sweep_spec(config_path);
    if (allow_alpha_mismatch) spec.base.allow_alpha_mismatch = true;
    const std::string out_dir = out_override.empty() ? spec.base.output : out_override;
    const adota::SweepTable table = adota::run_sweep(spec, out_dir, workers);
    adota::write_sweep_summary(table, out_dir + "/summary.csv");
    adota::emit_plot_script(table, out_dir + "/plot.gp");
    std::cout << "axis: " << table.axis << "\n";
    for (const auto& row : table.rows) {
        std::cout << table.axis << "=" << row.value << "  final loss " << row.final_loss_mean
                  << " +- " << row.final_loss_std;
        if (row.final_accuracy_mean) {
            std::cout << "  acc " << *row.final_accuracy_mean << " +- " << *row.final_accuracy_std;
        }
        if (row.diverged_runs > 0) std::cout << "  (" << row.diverged_runs << " diverged)";
        std::cout << "\n";
    }
    std::cout << "summary: " << out_dir << "/summary.csv\n";
    return kExitOk;
}

int cmd_bound(const std::string& config_path, const std::string& out_path) {
    const BoundRequest req = load_bound_request(config_path);
    adota::BoundBreakdown terms;
    if (req.theorem == "adagrad") {
        terms = adota::adagrad_bound_terms(req.inputs);
    } else {
        terms = adota::adam_bound_terms(req.inputs);
    }
    json out;
    out["theorem"] = req.theorem;
    out["upsilon"] = terms.upsilon;
    out["bound"] = terms.bound;
    out["terms"]["initial"] = terms.initial_term;
    out["terms"]["log_coefficient"] = terms.log_coefficient;
    out["terms"]["log_factor"] = terms.log_factor;
    const std::string text = out.dump(2) + "\n";
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("bound: cannot open " + out_path);
        f << text;
    }
    std::cout << text;
    return kExitOk;
}

int cmd_estimate_alpha(const std::string& samples_path, std::size_t k) {
    std::ifstream in(samples_path);
    if (!in) throw adota::ConfigError("estimate-alpha: cannot open " + samples_path);
    std::vector<double> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
            samples.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw adota::ConfigError("estimate-alpha: non-numeric line '" + line + "'");
        }
    }
    if (k == 0) k = adota::default_hill_k(samples.size());
    const adota::TailEstimate est = adota::estimate_tail_index(samples, k);
    json out;
    out["alpha_hat"] = est.alpha_hat;
    out["raw"] = est.raw;
    out["in_range"] = est.in_range;
    out["k"] = est.k;
    out["n"] = est.n;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// Randomized checks of the inequalities the convergence proofs lean on.
int cmd_selftest() {
    bool all_ok = true;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        all_ok = all_ok && ok;
    };

    adota::RngStream rng(20240901, adota::RngPurpose::Test);
    constexpr double kSlack = -1e-9;
    char detail[128];

    {
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        const double eps_grid[] = {1e-8, 1e-6, 1e-4, 1e-2, 1.0};
        for (int it = 0; it < 10000; ++it) {
            const std::size_t len = 1 + rng.next_u64() % 100;
            std::vector<double> seq(len);
            for (double& a : seq) a = rng.uniform(0.0, 10.0);
            const double eps = eps_grid[it % 5];
            const auto [lhs, rhs] = adota::lemma3_sides(seq, eps);
            worst = std::min(worst, rhs - lhs);
            ok = ok && (rhs - lhs >= kSlack);
        }
        std::snprintf(detail, sizeof detail, "min slack %.3g", worst);
        report("cumulative-sum ratio inequality", ok, detail);
    }
    {
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        const double phi_grid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
        const double eps_grid[] = {1e-8, 1e-6, 1e-4, 1e-2, 1.0};
        for (int it = 0; it < 10000; ++it) {
            const std::size_t len = 1 + rng.next_u64() % 100;
            std::vector<double> seq(len);
            for (double& a : seq) a = rng.uniform(0.0, 10.0);
            const auto [lhs, rhs] =
                adota::lemma4_sides(seq, phi_grid[it % 5], eps_grid[(it / 5) % 5]);
            worst = std::min(worst, rhs - lhs);
            ok = ok && (rhs - lhs >= kSlack);
        }
        std::snprintf(detail, sizeof detail, "min slack %.3g", worst);
        report("EMA ratio inequality", ok, detail);
    }
    {
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int it = 0; it < 10000; ++it) {
            const std::size_t d = 1 + rng.next_u64() % 16;
            adota::ParamVector u(d), v(d);
            for (std::size_t i = 0; i < d; ++i) {
                u[i] = rng.uniform(-5.0, 5.0);
                v[i] = rng.uniform(-5.0, 5.0);
            }
            const double alpha = rng.uniform(1.0, 2.0);
            const double lhs = std::pow(adota::lp_norm(adota::add(u, v), alpha), alpha);
            const double rhs = std::pow(adota::lp_norm(u, alpha), alpha) +
                               alpha * adota::dot(adota::signed_power(u, alpha - 1.0), v) +
                               4.0 * std::pow(adota::lp_norm(v, alpha), alpha);
            worst = std::min(worst, rhs - lhs);
            ok = ok && (rhs - lhs >= kSlack);
        }
        std::snprintf(detail, sizeof detail, "min slack %.3g", worst);
        report("signed-power expansion inequality", ok, detail);
    }

    return all_ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis toolkit for adaptive federated learning over the air"};
    app.require_subcommand(1);

    std::string config_path, out_path, samples_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t workers = 1;
    std::size_t hill_k = 0;
    bool allow_alpha_mismatch = false;

    auto* run = app.add_subcommand("run", "Execute a single training run");
    run->add_option("--config", config_path, "Run config JSON")->required();
    run->add_option("--seed", seed, "Master seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--out", out_path, "Output directory override");
    run->add_option("--workers", workers, "Worker threads for client gradients");
    run->add_flag("--allow-alpha-mismatch", allow_alpha_mismatch,
                  "Permit alpha_exp != channel tail index");

    auto* sweep = app.add_subcommand("sweep", "Run an axis sweep (values x seeds)");
    sweep->add_option("--config", config_path, "Sweep config JSON")->required();
    sweep->add_option("--out", out_path, "Output directory override");
    sweep->add_option("--workers", workers, "Parallel runs");
    sweep->add_flag("--allow-alpha-mismatch", allow_alpha_mismatch,
                    "Permit alpha_exp != channel tail index");

    auto* bound = app.add_subcommand("bound", "Evaluate a convergence-rate bound");
    bound->add_option("--config", config_path, "Bound inputs JSON")->required();
    bound->add_option("--out", out_path, "Also write the JSON result here");

    auto* est = app.add_subcommand("estimate-alpha", "Hill tail-index estimate from a sample file");
    est->add_option("--samples", samples_path, "Text file, one value per line")->required();
    est->add_option("--k", hill_k, "Order statistics to use (default floor(sqrt(n)))");

    app.add_subcommand("selftest", "Run the randomized inequality oracles");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seed_set ? &seed : nullptr, out_path, workers,
                           allow_alpha_mismatch);
        }
        if (sweep->parsed()) return cmd_sweep(config_path, out_path, workers, allow_alpha_mismatch);
        if (bound->parsed()) return cmd_bound(config_path, out_path);
        if (est->parsed()) return cmd_estimate_alpha(samples_path, hill_k);
        return cmd_selftest();
    } catch (const adota::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        // bad values reaching library preconditions are still config errors here
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const adota::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
