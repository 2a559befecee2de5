#include "limeout/logistic.hpp"

#include <algorithm>
#include <cmath>

namespace limeout {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double LogisticModel::linear_term(std::span<const double> row) const {
    double z = intercept_;
    for (std::size_t f = 0; f < feature_names_.size(); ++f) {
        if (kinds_[f] == FeatureKind::Numerical) {
            z += weights_[dim_offset_[f]] * (row[f] - num_mean_[f]) * num_scale_[f];
        } else {
            auto code = static_cast<std::size_t>(row[f]);
            if (code < cardinality_[f]) z += weights_[dim_offset_[f] + code];
        }
    }
    return z;
}

double LogisticModel::predict_proba(std::span<const double> row) const {
    return sigmoid(linear_term(row));
}

double LogisticModel::regularized_loss(const Dataset& d, double l2) const {
    double loss = 0.0;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
        double p = predict_proba(d.row(r));
        p = std::clamp(p, 1e-15, 1.0 - 1e-15);
        loss -= d.labels[r] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    loss /= static_cast<double>(d.n_rows());
    double reg = 0.0;
    for (double w : weights_) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

ModelPtr train_logistic(const Dataset& train, const LogisticHyper& hyper, std::uint64_t seed) {
    (void)seed;  // zero-init full-batch descent has no stochastic step
    if (train.n_rows() == 0) throw ArgumentError("train_logistic: empty training set");

    auto model = std::make_shared<LogisticModel>();
    const std::size_t d = train.n_features();
    model->feature_names_.reserve(d);
    for (const auto& f : train.schema.features) model->feature_names_.push_back(f.name);
    model->kinds_.resize(d);
    model->num_mean_.assign(d, 0.0);
    model->num_scale_.assign(d, 0.0);
    model->dim_offset_.resize(d);
    model->cardinality_.assign(d, 0);

    const std::size_t n = train.n_rows();
    std::size_t n_dims = 0;
    for (std::size_t f = 0; f < d; ++f) {
        model->kinds_[f] = train.schema.features[f].kind;
        model->dim_offset_[f] = n_dims;
        if (train.schema.is_categorical(f)) {
            model->cardinality_[f] = train.schema.cardinality(f);
            n_dims += model->cardinality_[f];
        } else {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) sum += train.at(r, f);
            double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                double diff = train.at(r, f) - mean;
                ss += diff * diff;
            }
            double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            model->num_mean_[f] = mean;
            model->num_scale_[f] = sd > 0.0 ? 1.0 / sd : 0.0;
            n_dims += 1;
        }
    }
    model->weights_.assign(n_dims, 0.0);
    model->intercept_ = 0.0;

    // Expanded values are sparse per row: one slot per feature. Precompute
    // (dim, value) pairs once instead of materializing the one-hot matrix.
    std::vector<std::size_t> dims(n * d);
    std::vector<double> vals(n * d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t f = 0; f < d; ++f) {
            std::size_t slot = r * d + f;
            if (train.schema.is_categorical(f)) {
                dims[slot] = model->dim_offset_[f] + static_cast<std::size_t>(train.at(r, f));
                vals[slot] = 1.0;
            } else {
                dims[slot] = model->dim_offset_[f];
                vals[slot] = (train.at(r, f) - model->num_mean_[f]) * model->num_scale_[f];
            }
        }
    }

    std::vector<double> grad(n_dims);
    bool converged = false;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int epoch = 0; epoch < hyper.epochs && !converged; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t base = r * d;
            double z = model->intercept_;
            for (std::size_t f = 0; f < d; ++f)
                z += model->weights_[dims[base + f]] * vals[base + f];
            double err = sigmoid(z) - static_cast<double>(train.labels[r]);
            for (std::size_t f = 0; f < d; ++f)
                grad[dims[base + f]] += err * vals[base + f];
            grad_b += err;
        }
        double max_grad = std::abs(grad_b * inv_n);
        for (std::size_t j = 0; j < n_dims; ++j) {
            double g = grad[j] * inv_n + hyper.l2 * model->weights_[j];
            model->weights_[j] -= hyper.learning_rate * g;
            max_grad = std::max(max_grad, std::abs(g));
        }
        model->intercept_ -= hyper.learning_rate * grad_b * inv_n;
        converged = max_grad < hyper.gradient_tol;
    }
    model->converged_ = converged;
    return model;
}

nlohmann::ordered_json LogisticModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "logistic";
    j["decision_threshold"] = threshold_;
    j["converged"] = converged_;
    j["features"] = feature_names_;
    std::vector<int> kinds;
    for (auto k : kinds_) kinds.push_back(k == FeatureKind::Categorical ? 1 : 0);
    j["categorical"] = kinds;
    j["num_mean"] = num_mean_;
    j["num_scale"] = num_scale_;
    j["dim_offset"] = dim_offset_;
    j["cardinality"] = cardinality_;
    j["weights"] = weights_;
    j["intercept"] = intercept_;
    return j;
}

std::shared_ptr<LogisticModel> LogisticModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<LogisticModel>();
    m->threshold_ = j.at("decision_threshold").get<double>();
    m->converged_ = j.at("converged").get<bool>();
    m->feature_names_ = j.at("features").get<std::vector<std::string>>();
    for (int k : j.at("categorical").get<std::vector<int>>())
        m->kinds_.push_back(k ? FeatureKind::Categorical : FeatureKind::Numerical);
    m->num_mean_ = j.at("num_mean").get<std::vector<double>>();
    m->num_scale_ = j.at("num_scale").get<std::vector<double>>();
    m->dim_offset_ = j.at("dim_offset").get<std::vector<std::size_t>>();
    m->cardinality_ = j.at("cardinality").get<std::vector<std::size_t>>();
    m->weights_ = j.at("weights").get<std::vector<double>>();
    m->intercept_ = j.at("intercept").get<double>();
    return m;
}

}  // namespace limeout
