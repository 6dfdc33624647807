#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adota/param_math.hpp"
#include "adota/rng.hpp"

namespace adota {

/// Row-major feature matrix with one label per row. num_classes = 0 marks a
/// regression/center dataset; classification labels are integer class ids
/// stored as doubles.
struct Dataset {
    std::vector<double> features;  // rows * cols, row-major
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> labels;
    int num_classes = 0;

    double feature(std::size_t i, std::size_t j) const { return features[i * cols + j]; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features.data() + i * cols, cols);
    }
    int label_class(std::size_t i) const { return static_cast<int>(labels[i]); }
    bool is_classification() const { return num_classes > 0; }

    void validate() const;
};

/// Seeded Gaussian-mixture classification data: one spherical Gaussian per
/// class, balanced class counts, means drawn from N(0, class_spread^2 I).
Dataset make_gaussian_mixture(std::size_t samples, std::size_t features, int classes,
                              double class_spread, double noise_std, RngStream& rng);

/// Seeded linear-regression data: y = <x, beta> + N(0, noise_std^2).
Dataset make_linear_regression(std::size_t samples, std::size_t features, double noise_std,
                               RngStream& rng);

/// CSV: header row, one sample per row, label in the final column, UTF-8,
/// decimal-point reals. classification = true turns labels into class ids.
Dataset load_csv_dataset(const std::string& path, bool classification);

/// Disjoint client index lists covering the dataset; every client nonempty.
struct Partition {
    std::vector<std::vector<std::size_t>> assignments;

    std::size_t n_clients() const { return assignments.size(); }
    void validate(std::size_t total_samples) const;
};

/// Symmetric-Dirichlet class allocation: for each class, draw proportions
/// over clients from Dirichlet(concentration, ...) and split that class's
/// samples accordingly. Retries the draw (up to 100 times) if any client
/// would end up empty.
Partition dirichlet_partition(const Dataset& dataset, std::size_t n_clients, double concentration,
                              RngStream& rng);

/// Uniform shuffled split for datasets without class structure.
Partition iid_partition(std::size_t n_samples, std::size_t n_clients, RngStream& rng);

enum class LossKind { Quadratic, LogisticRegression, SoftmaxLinear, SmallMLP };

const char* to_string(LossKind kind);

struct MlpShape {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::size_t outputs = 0;
};

/// Loss-model kind plus the shape metadata that fixes the model dimension d.
///
///  - Quadratic: f(w) = mean_i 0.5*||w - x_i||^2 over the client's rows
///    (rows act as centers; labels ignored). Exposes analytic smoothness
///    L = 1 and the exact global minimum for bound evaluation.
///  - LogisticRegression: binary cross-entropy, labels in {0, 1}, d = cols.
///  - SoftmaxLinear: multinomial logistic regression, d = classes * cols.
///  - SmallMLP: one tanh hidden layer + softmax output,
///    d = h*(in+1) + out*(h+1).
class LossModel {
public:
    static LossModel quadratic(std::size_t dim);
    static LossModel logistic(std::size_t features);
    static LossModel softmax_linear(std::size_t features, std::size_t classes);
    static LossModel small_mlp(MlpShape shape);

    LossKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    std::size_t classes() const { return classes_; }
    const MlpShape& mlp() const { return mlp_; }

private:
    LossKind kind_ = LossKind::Quadratic;
    std::size_t dim_ = 0;
    std::size_t classes_ = 0;
    MlpShape mlp_{};
};

/// Exact full-batch gradient of the client's empirical loss at w.
ParamVector local_gradient(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                           std::span<const std::size_t> indices);

/// Client-side round computation. local_steps = 1 returns the full-batch
/// gradient exactly; local_steps > 1 runs that many plain gradient steps of
/// size local_eta and returns the averaged pseudo-gradient (w - w') /
/// (local_eta * local_steps).
ParamVector client_update(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                          std::span<const std::size_t> indices, std::size_t local_steps,
                          double local_eta);

/// Mean empirical loss over the given rows.
double local_loss(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                  std::span<const std::size_t> indices);

/// Eq.-style unweighted client average: (1/N) * sum_n local_loss(client n).
double global_loss(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                   const Partition& partition);

/// True global gradient (1/N) * sum_n grad f_n(w), computed noise-free.
ParamVector global_gradient(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                            const Partition& partition);

/// Upper bound on ||grad f_n(w)||_inf. Logistic/Softmax derive it from the
/// feature magnitudes; Quadratic needs a domain box ||w||_inf <= radius and
/// SmallMLP is unbounded (throws; callers must supply C themselves).
double grad_bound_C(const LossModel& model, const Dataset& dataset, double domain_radius = 0.0);

/// Classification accuracy of w on the dataset; throws for regression kinds.
double accuracy(const LossModel& model, const ParamVector& w, const Dataset& dataset);

/// Smoothness constant of the quadratic model (exact, any norm).
double quadratic_smoothness();

/// Exact minimum of the client-averaged quadratic objective.
double quadratic_fstar(const Dataset& dataset, const Partition& partition);

}  // namespace adota
