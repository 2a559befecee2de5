#pragma once

#include "limeout/model.hpp"

namespace limeout {

struct ForestHyper {
    int n_trees = 100;
    int max_depth = 16;             // negative = unlimited, 0 = single-leaf trees
    int min_leaf = 1;
    int features_per_split = -1;    // negative = floor(sqrt(d)), 0 = all features
    bool bootstrap = true;
    int max_bins = 255;             // candidate-threshold resolution per feature
};

// Bagged Gini-split decision trees over raw encoded values (categorical codes
// are split by threshold like numericals). predict_proba is the fraction of
// trees whose leaf votes class 1.
class ForestModel final : public Model {
public:
    struct Node {
        int feature = -1;       // -1 marks a leaf
        double threshold = 0.0; // go left when value < threshold
        int left = -1, right = -1;
        int vote = 0;
    };

    double predict_proba(std::span<const double> row) const override;
    const std::vector<std::string>& active_features() const override { return feature_names_; }
    std::string kind() const override { return "forest"; }
    nlohmann::ordered_json to_json() const override;
    static std::shared_ptr<ForestModel> from_json(const nlohmann::json& j);

    std::size_t n_trees() const { return trees_.size(); }

    friend ModelPtr train_forest(const Dataset&, const ForestHyper&, std::uint64_t);

private:
    std::vector<std::string> feature_names_;
    std::vector<std::vector<Node>> trees_;
};

ModelPtr train_forest(const Dataset& train, const ForestHyper& hyper, std::uint64_t seed);

}  // namespace limeout
