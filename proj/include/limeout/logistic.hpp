#pragma once

#include "limeout/model.hpp"

namespace limeout {

struct LogisticHyper {
    double learning_rate = 1.0;
    int epochs = 3000;
    double l2 = 1e-4;
    double gradient_tol = 1e-7;  // early stop when max |gradient| falls below
};

// L2-regularized logistic regression fit by full-batch gradient descent from
// zero initialization. Numerical features are standardized and categorical
// features one-hot expanded internally; rows passed to predict_proba stay in
// the original encoded layout.
class LogisticModel final : public Model {
public:
    double predict_proba(std::span<const double> row) const override;
    const std::vector<std::string>& active_features() const override { return feature_names_; }
    std::string kind() const override { return "logistic"; }
    nlohmann::ordered_json to_json() const override;
    static std::shared_ptr<LogisticModel> from_json(const nlohmann::json& j);

    // Mean log-loss plus 0.5 * l2 * ||w||^2 over an expanded design; exposed
    // for the gradient check.
    double regularized_loss(const Dataset& d, double l2) const;

    friend ModelPtr train_logistic(const Dataset&, const LogisticHyper&, std::uint64_t);

private:
    double linear_term(std::span<const double> row) const;

    std::vector<std::string> feature_names_;
    std::vector<FeatureKind> kinds_;
    std::vector<double> num_mean_, num_scale_;   // scale = 1/stddev, 0 for constant
    std::vector<std::size_t> dim_offset_;        // feature -> first expanded dim
    std::vector<std::size_t> cardinality_;       // 0 for numerical
    std::vector<double> weights_;
    double intercept_ = 0.0;
};

ModelPtr train_logistic(const Dataset& train, const LogisticHyper& hyper, std::uint64_t seed);

}  // namespace limeout
