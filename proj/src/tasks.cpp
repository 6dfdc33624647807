#include "adota/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "adota/errors.hpp"

namespace adota {

void Dataset::validate() const {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Dataset: empty");
    if (features.size() != rows * cols) throw std::invalid_argument("Dataset: feature size mismatch");
    if (labels.size() != rows) throw std::invalid_argument("Dataset: label count mismatch");
    for (double x : features) {
        if (!std::isfinite(x)) throw std::invalid_argument("Dataset: non-finite feature value");
    }
    if (num_classes > 0) {
        for (double y : labels) {
            const int c = static_cast<int>(y);
            if (c < 0 || c >= num_classes || static_cast<double>(c) != y) {
                throw std::invalid_argument("Dataset: label outside class range");
            }
        }
    }
}

Dataset make_gaussian_mixture(std::size_t samples, std::size_t features, int classes,
                              double class_spread, double noise_std, RngStream& rng) {
    if (classes < 2) throw std::invalid_argument("make_gaussian_mixture: need >= 2 classes");
    if (samples < static_cast<std::size_t>(classes)) {
        throw std::invalid_argument("make_gaussian_mixture: need >= 1 sample per class");
    }
    std::vector<double> means(static_cast<std::size_t>(classes) * features);
    for (double& m : means) m = class_spread * rng.gaussian();

    Dataset ds;
    ds.rows = samples;
    ds.cols = features;
    ds.num_classes = classes;
    ds.features.resize(samples * features);
    ds.labels.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const int k = static_cast<int>(i % static_cast<std::size_t>(classes));
        ds.labels[i] = static_cast<double>(k);
        for (std::size_t j = 0; j < features; ++j) {
            ds.features[i * features + j] =
                means[static_cast<std::size_t>(k) * features + j] + noise_std * rng.gaussian();
        }
    }
    ds.validate();
    return ds;
}

Dataset make_linear_regression(std::size_t samples, std::size_t features, double noise_std,
                               RngStream& rng) {
    std::vector<double> beta(features);
    for (double& b : beta) b = rng.gaussian();

    Dataset ds;
    ds.rows = samples;
    ds.cols = features;
    ds.num_classes = 0;
    ds.features.resize(samples * features);
    ds.labels.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double y = 0.0;
        for (std::size_t j = 0; j < features; ++j) {
            const double x = rng.gaussian();
            ds.features[i * features + j] = x;
            y += x * beta[j];
        }
        ds.labels[i] = y + noise_std * rng.gaussian();
    }
    ds.validate();
    return ds;
}

Dataset load_csv_dataset(const std::string& path, bool classification) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_csv_dataset: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("load_csv_dataset: missing header in " + path);

    Dataset ds;
    std::size_t expected_fields = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> fields;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("load_csv_dataset: non-numeric cell '" + cell + "' in " + path);
            }
        }
        if (fields.size() < 2) throw ConfigError("load_csv_dataset: row needs features + label");
        if (expected_fields == 0) {
            expected_fields = fields.size();
        } else if (fields.size() != expected_fields) {
            throw ConfigError("load_csv_dataset: ragged row in " + path);
        }
        ds.labels.push_back(fields.back());
        ds.features.insert(ds.features.end(), fields.begin(), fields.end() - 1);
        ds.rows += 1;
    }
    if (ds.rows == 0) throw ConfigError("load_csv_dataset: no data rows in " + path);
    ds.cols = expected_fields - 1;
    if (classification) {
        int max_class = 0;
        for (double y : ds.labels) max_class = std::max(max_class, static_cast<int>(y));
        ds.num_classes = max_class + 1;
    }
    ds.validate();
    return ds;
}

void Partition::validate(std::size_t total_samples) const {
    std::vector<char> seen(total_samples, 0);
    std::size_t count = 0;
    for (const auto& client : assignments) {
        if (client.empty()) throw std::invalid_argument("Partition: empty client");
        for (std::size_t idx : client) {
            if (idx >= total_samples) throw std::invalid_argument("Partition: index out of range");
            if (seen[idx]) throw std::invalid_argument("Partition: duplicate index");
            seen[idx] = 1;
            ++count;
        }
    }
    if (count != total_samples) throw std::invalid_argument("Partition: does not cover the dataset");
}

namespace {

// Marsaglia-Tsang, with the shape boost for a < 1.
double sample_gamma(double shape, RngStream& rng) {
    if (shape < 1.0) {
        const double u = rng.uniform01();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> sample_dirichlet(std::size_t n, double concentration, RngStream& rng) {
    std::vector<double> p(n);
    double sum = 0.0;
    for (double& x : p) {
        x = sample_gamma(concentration, rng);
        sum += x;
    }
    if (sum <= 0.0) return {};  // all draws underflowed; caller retries
    for (double& x : p) x /= sum;
    return p;
}

void shuffle_indices(std::vector<std::size_t>& idx, RngStream& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = rng.next_u64() % i;
        std::swap(idx[i - 1], idx[j]);
    }
}

}  // namespace

Partition dirichlet_partition(const Dataset& dataset, std::size_t n_clients, double concentration,
                              RngStream& rng) {
    dataset.validate();
    if (!dataset.is_classification()) {
        throw std::invalid_argument("dirichlet_partition: requires a classification dataset");
    }
    if (n_clients < 1) throw std::invalid_argument("dirichlet_partition: need >= 1 client");
    if (n_clients > dataset.rows) {
        throw std::invalid_argument("dirichlet_partition: more clients than samples");
    }
    if (!(concentration > 0.0)) {
        throw std::invalid_argument("dirichlet_partition: concentration must be > 0");
    }

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(dataset.num_classes));
    for (std::size_t i = 0; i < dataset.rows; ++i) {
        by_class[static_cast<std::size_t>(dataset.label_class(i))].push_back(i);
    }

    for (int attempt = 0; attempt < 100; ++attempt) {
        Partition part;
        part.assignments.assign(n_clients, {});
        bool ok = true;
        for (const auto& members : by_class) {
            if (members.empty()) continue;
            const std::vector<double> p = sample_dirichlet(n_clients, concentration, rng);
            if (p.empty()) {
                ok = false;
                break;
            }
            // split this class by cumulative quota
            double cum = 0.0;
            std::size_t start = 0;
            for (std::size_t c = 0; c < n_clients; ++c) {
                cum += p[c];
                const std::size_t end =
                    (c + 1 == n_clients)
                        ? members.size()
                        : std::min(members.size(),
                                   static_cast<std::size_t>(cum * static_cast<double>(members.size())));
                for (std::size_t k = start; k < end; ++k) {
                    part.assignments[c].push_back(members[k]);
                }
                start = std::max(start, end);
            }
        }
        if (!ok) continue;
        const bool any_empty = std::any_of(part.assignments.begin(), part.assignments.end(),
                                           [](const auto& a) { return a.empty(); });
        if (any_empty) continue;
        part.validate(dataset.rows);
        return part;
    }
    throw std::runtime_error(
        "dirichlet_partition: could not produce nonempty clients in 100 attempts");
}

Partition iid_partition(std::size_t n_samples, std::size_t n_clients, RngStream& rng) {
    if (n_clients < 1 || n_clients > n_samples) {
        throw std::invalid_argument("iid_partition: need 1 <= clients <= samples");
    }
    std::vector<std::size_t> idx(n_samples);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_indices(idx, rng);
    Partition part;
    part.assignments.assign(n_clients, {});
    for (std::size_t i = 0; i < n_samples; ++i) {
        part.assignments[i % n_clients].push_back(idx[i]);
    }
    part.validate(n_samples);
    return part;
}

const char* to_string(LossKind kind) {
    switch (kind) {
        case LossKind::Quadratic: return "quadratic";
        case LossKind::LogisticRegression: return "logistic";
        case LossKind::SoftmaxLinear: return "softmax_linear";
        case LossKind::SmallMLP: return "small_mlp";
    }
    return "unknown";
}

LossModel LossModel::quadratic(std::size_t dim) {
    LossModel m;
    m.kind_ = LossKind::Quadratic;
    m.dim_ = dim;
    return m;
}

LossModel LossModel::logistic(std::size_t features) {
    LossModel m;
    m.kind_ = LossKind::LogisticRegression;
    m.dim_ = features;
    m.classes_ = 2;
    return m;
}

LossModel LossModel::softmax_linear(std::size_t features, std::size_t classes) {
    if (classes < 2) throw std::invalid_argument("LossModel: softmax needs >= 2 classes");
    LossModel m;
    m.kind_ = LossKind::SoftmaxLinear;
    m.dim_ = features * classes;
    m.classes_ = classes;
    return m;
}

LossModel LossModel::small_mlp(MlpShape shape) {
    if (shape.inputs == 0 || shape.hidden == 0 || shape.outputs < 2) {
        throw std::invalid_argument("LossModel: bad MLP shape");
    }
    LossModel m;
    m.kind_ = LossKind::SmallMLP;
    m.mlp_ = shape;
    m.classes_ = shape.outputs;
    m.dim_ = shape.hidden * (shape.inputs + 1) + shape.outputs * (shape.hidden + 1);
    return m;
}

namespace {

void check_indices(const Dataset& ds, std::span<const std::size_t> indices) {
    if (indices.empty()) throw std::invalid_argument("loss model: empty index list");
    for (std::size_t i : indices) {
        if (i >= ds.rows) throw std::invalid_argument("loss model: sample index out of range");
    }
}

double stable_softplus(double x) {
    // ln(1 + e^x) without overflow
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

void softmax_inplace(std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

// MLP parameter layout: [W1 (h x in), b1 (h), W2 (out x h), b2 (out)].
struct MlpView {
    const MlpShape& s;
    std::size_t w1_off = 0, b1_off, w2_off, b2_off;
    explicit MlpView(const MlpShape& shape) : s(shape) {
        b1_off = s.hidden * s.inputs;
        w2_off = b1_off + s.hidden;
        b2_off = w2_off + s.outputs * s.hidden;
    }
};

void mlp_forward(const MlpView& v, const ParamVector& w, std::span<const double> x,
                 std::vector<double>& hidden, std::vector<double>& probs) {
    hidden.assign(v.s.hidden, 0.0);
    for (std::size_t h = 0; h < v.s.hidden; ++h) {
        double z = w[v.b1_off + h];
        for (std::size_t j = 0; j < v.s.inputs; ++j) z += w[v.w1_off + h * v.s.inputs + j] * x[j];
        hidden[h] = std::tanh(z);
    }
    probs.assign(v.s.outputs, 0.0);
    for (std::size_t k = 0; k < v.s.outputs; ++k) {
        double z = w[v.b2_off + k];
        for (std::size_t h = 0; h < v.s.hidden; ++h) z += w[v.w2_off + k * v.s.hidden + h] * hidden[h];
        probs[k] = z;
    }
    softmax_inplace(probs);
}

}  // namespace

ParamVector local_gradient(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                           std::span<const std::size_t> indices) {
    check_indices(dataset, indices);
    if (w.dim() != model.dim()) throw std::invalid_argument("local_gradient: w dimension mismatch");
    const double inv_m = 1.0 / static_cast<double>(indices.size());
    ParamVector grad(model.dim());

    switch (model.kind()) {
        case LossKind::Quadratic: {
            if (dataset.cols != model.dim()) {
                throw std::invalid_argument("local_gradient: quadratic dim != dataset cols");
            }
            for (std::size_t i : indices) {
                for (std::size_t j = 0; j < dataset.cols; ++j) {
                    grad[j] += (w[j] - dataset.feature(i, j)) * inv_m;
                }
            }
            break;
        }
        case LossKind::LogisticRegression: {
            for (std::size_t i : indices) {
                const double y = dataset.labels[i] > 0.5 ? 1.0 : -1.0;
                double margin = 0.0;
                for (std::size_t j = 0; j < dataset.cols; ++j) margin += w[j] * dataset.feature(i, j);
                margin *= y;
                const double coeff = -y / (1.0 + std::exp(margin));  // -y * sigmoid(-margin)
                for (std::size_t j = 0; j < dataset.cols; ++j) {
                    grad[j] += coeff * dataset.feature(i, j) * inv_m;
                }
            }
            break;
        }
        case LossKind::SoftmaxLinear: {
            const std::size_t k_classes = model.classes();
            const std::size_t p = dataset.cols;
            std::vector<double> logits(k_classes);
            for (std::size_t i : indices) {
                for (std::size_t k = 0; k < k_classes; ++k) {
                    double z = 0.0;
                    for (std::size_t j = 0; j < p; ++j) z += w[k * p + j] * dataset.feature(i, j);
                    logits[k] = z;
                }
                softmax_inplace(logits);
                const std::size_t y = static_cast<std::size_t>(dataset.label_class(i));
                for (std::size_t k = 0; k < k_classes; ++k) {
                    const double coeff = (logits[k] - (k == y ? 1.0 : 0.0)) * inv_m;
                    for (std::size_t j = 0; j < p; ++j) grad[k * p + j] += coeff * dataset.feature(i, j);
                }
            }
            break;
        }
        case LossKind::SmallMLP: {
            const MlpView v(model.mlp());
            std::vector<double> hidden, probs, dhidden(v.s.hidden);
            for (std::size_t i : indices) {
                const auto x = dataset.row(i);
                mlp_forward(v, w, x, hidden, probs);
                const std::size_t y = static_cast<std::size_t>(dataset.label_class(i));
                std::fill(dhidden.begin(), dhidden.end(), 0.0);
                for (std::size_t k = 0; k < v.s.outputs; ++k) {
                    const double dz = (probs[k] - (k == y ? 1.0 : 0.0)) * inv_m;
                    for (std::size_t h = 0; h < v.s.hidden; ++h) {
                        grad[v.w2_off + k * v.s.hidden + h] += dz * hidden[h];
                        dhidden[h] += w[v.w2_off + k * v.s.hidden + h] * dz;
                    }
                    grad[v.b2_off + k] += dz;
                }
                for (std::size_t h = 0; h < v.s.hidden; ++h) {
                    const double dpre = dhidden[h] * (1.0 - hidden[h] * hidden[h]);
                    for (std::size_t j = 0; j < v.s.inputs; ++j) {
                        grad[v.w1_off + h * v.s.inputs + j] += dpre * x[j];
                    }
                    grad[v.b1_off + h] += dpre;
                }
            }
            break;
        }
    }
    grad.require_finite("local_gradient");
    return grad;
}

ParamVector client_update(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                          std::span<const std::size_t> indices, std::size_t local_steps,
                          double local_eta) {
    if (local_steps == 0) throw std::invalid_argument("client_update: local_steps must be >= 1");
    if (local_steps == 1) return local_gradient(model, w, dataset, indices);
    if (!(local_eta > 0.0)) throw std::invalid_argument("client_update: local_eta must be > 0");
    ParamVector cur = w;
    for (std::size_t k = 0; k < local_steps; ++k) {
        axpy(cur, -local_eta, local_gradient(model, cur, dataset, indices));
    }
    ParamVector pseudo = sub(w, cur);
    return scale(pseudo, 1.0 / (local_eta * static_cast<double>(local_steps)));
}

double local_loss(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                  std::span<const std::size_t> indices) {
    check_indices(dataset, indices);
    if (w.dim() != model.dim()) throw std::invalid_argument("local_loss: w dimension mismatch");
    const double inv_m = 1.0 / static_cast<double>(indices.size());
    double loss = 0.0;

    switch (model.kind()) {
        case LossKind::Quadratic: {
            for (std::size_t i : indices) {
                double sq = 0.0;
                for (std::size_t j = 0; j < dataset.cols; ++j) {
                    const double diff = w[j] - dataset.feature(i, j);
                    sq += diff * diff;
                }
                loss += 0.5 * sq * inv_m;
            }
            break;
        }
        case LossKind::LogisticRegression: {
            for (std::size_t i : indices) {
                const double y = dataset.labels[i] > 0.5 ? 1.0 : -1.0;
                double margin = 0.0;
                for (std::size_t j = 0; j < dataset.cols; ++j) margin += w[j] * dataset.feature(i, j);
                loss += stable_softplus(-y * margin) * inv_m;
            }
            break;
        }
        case LossKind::SoftmaxLinear: {
            const std::size_t k_classes = model.classes();
            const std::size_t p = dataset.cols;
            std::vector<double> logits(k_classes);
            for (std::size_t i : indices) {
                for (std::size_t k = 0; k < k_classes; ++k) {
                    double z = 0.0;
                    for (std::size_t j = 0; j < p; ++j) z += w[k * p + j] * dataset.feature(i, j);
                    logits[k] = z;
                }
                const double m = *std::max_element(logits.begin(), logits.end());
                double lse = 0.0;
                for (double z : logits) lse += std::exp(z - m);
                lse = m + std::log(lse);
                loss += (lse - logits[static_cast<std::size_t>(dataset.label_class(i))]) * inv_m;
            }
            break;
        }
        case LossKind::SmallMLP: {
            const MlpView v(model.mlp());
            std::vector<double> hidden, probs;
            for (std::size_t i : indices) {
                mlp_forward(v, w, dataset.row(i), hidden, probs);
                const std::size_t y = static_cast<std::size_t>(dataset.label_class(i));
                loss += -std::log(std::max(probs[y], 1e-300)) * inv_m;
            }
            break;
        }
    }
    return loss;
}

double global_loss(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                   const Partition& partition) {
    partition.validate(dataset.rows);
    double sum = 0.0;
    for (const auto& client : partition.assignments) {
        sum += local_loss(model, w, dataset, client);
    }
    return sum / static_cast<double>(partition.n_clients());
}

ParamVector global_gradient(const LossModel& model, const ParamVector& w, const Dataset& dataset,
                            const Partition& partition) {
    partition.validate(dataset.rows);
    ParamVector sum(model.dim());
    for (const auto& client : partition.assignments) {
        axpy(sum, 1.0, local_gradient(model, w, dataset, client));
    }
    return scale(sum, 1.0 / static_cast<double>(partition.n_clients()));
}

double grad_bound_C(const LossModel& model, const Dataset& dataset, double domain_radius) {
    double max_abs_feature = 0.0;
    for (double x : dataset.features) max_abs_feature = std::max(max_abs_feature, std::abs(x));

    switch (model.kind()) {
        case LossKind::LogisticRegression:
        case LossKind::SoftmaxLinear:
            // per-sample loss derivative w.r.t. any logit has magnitude <= 1
            return max_abs_feature;
        case LossKind::Quadratic:
            if (!(domain_radius > 0.0)) {
                throw std::invalid_argument(
                    "grad_bound_C: quadratic model needs a domain box radius");
            }
            return domain_radius + max_abs_feature;
        case LossKind::SmallMLP:
            throw std::invalid_argument(
                "grad_bound_C: unbounded for SmallMLP; supply C explicitly");
    }
    throw std::invalid_argument("grad_bound_C: unknown loss kind");
}

double accuracy(const LossModel& model, const ParamVector& w, const Dataset& dataset) {
    if (!dataset.is_classification()) {
        throw std::invalid_argument("accuracy: classification datasets only");
    }
    std::size_t correct = 0;
    switch (model.kind()) {
        case LossKind::LogisticRegression: {
            for (std::size_t i = 0; i < dataset.rows; ++i) {
                double margin = 0.0;
                for (std::size_t j = 0; j < dataset.cols; ++j) margin += w[j] * dataset.feature(i, j);
                const int pred = margin > 0.0 ? 1 : 0;
                if (pred == dataset.label_class(i)) ++correct;
            }
            break;
        }
        case LossKind::SoftmaxLinear: {
            const std::size_t k_classes = model.classes();
            const std::size_t p = dataset.cols;
            for (std::size_t i = 0; i < dataset.rows; ++i) {
                std::size_t best = 0;
                double best_z = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < k_classes; ++k) {
                    double z = 0.0;
                    for (std::size_t j = 0; j < p; ++j) z += w[k * p + j] * dataset.feature(i, j);
                    if (z > best_z) {
                        best_z = z;
                        best = k;
                    }
                }
                if (static_cast<int>(best) == dataset.label_class(i)) ++correct;
            }
            break;
        }
        case LossKind::SmallMLP: {
            const MlpView v(model.mlp());
            std::vector<double> hidden, probs;
            for (std::size_t i = 0; i < dataset.rows; ++i) {
                mlp_forward(v, w, dataset.row(i), hidden, probs);
                const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
                if (static_cast<int>(best) == dataset.label_class(i)) ++correct;
            }
            break;
        }
        case LossKind::Quadratic:
            throw std::invalid_argument("accuracy: not defined for the quadratic model");
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.rows);
}

double quadratic_smoothness() { return 1.0; }

double quadratic_fstar(const Dataset& dataset, const Partition& partition) {
    partition.validate(dataset.rows);
    const std::size_t d = dataset.cols;
    const double inv_n = 1.0 / static_cast<double>(partition.n_clients());

    std::vector<double> centroid_avg(d, 0.0);
    double second_moment = 0.0;  // (1/N) sum_n (1/m_n) sum_i 0.5*||x_i||^2
    for (const auto& client : partition.assignments) {
        const double inv_m = 1.0 / static_cast<double>(client.size());
        for (std::size_t i : client) {
            double sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                centroid_avg[j] += dataset.feature(i, j) * inv_m * inv_n;
                sq += dataset.feature(i, j) * dataset.feature(i, j);
            }
            second_moment += 0.5 * sq * inv_m * inv_n;
        }
    }
    double center_sq = 0.0;
    for (double c : centroid_avg) center_sq += c * c;
    return second_moment - 0.5 * center_sq;
}

}  // namespace adota
