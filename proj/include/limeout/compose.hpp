#pragma once

#include "limeout/forest.hpp"
#include "limeout/logistic.hpp"
#include "limeout/model.hpp"

namespace limeout {

// How to train one classifier of the pool; dropout members retrain the same
// recipe on a column-reduced view of the data.
struct TrainingRecipe {
    std::string kind = "logistic";  // "logistic" | "forest"
    LogisticHyper logistic;
    ForestHyper forest;
    bool tune = true;  // F1 threshold tuning on the training set after fitting

    ModelPtr train(const Dataset& train_data, std::uint64_t seed) const;
};

// Accepts full-width rows and projects out the dropped columns before
// delegating, so every pool member consumes identical inputs. The dropped
// features are removed at training time as well; the wrapper provably
// cannot read them.
class DropoutModel final : public Model {
public:
    DropoutModel(ModelPtr inner, std::vector<std::string> full_features,
                 std::vector<std::size_t> keep_indices, std::vector<std::string> dropped);

    double predict_proba(std::span<const double> row) const override;
    const std::vector<std::string>& active_features() const override {
        return inner_->active_features();
    }
    const std::vector<std::string>& input_features() const override { return full_features_; }
    std::string kind() const override { return "dropout-wrapper"; }
    nlohmann::ordered_json to_json() const override;
    static std::shared_ptr<DropoutModel> from_json(const nlohmann::json& j);

    const std::vector<std::string>& dropped_features() const { return dropped_; }
    const Model& inner() const { return *inner_; }

private:
    ModelPtr inner_;
    std::vector<std::string> full_features_;
    std::vector<std::size_t> keep_indices_;
    std::vector<std::string> dropped_;
};

// Retrains the recipe without the dropped columns and wraps the result so it
// still accepts full-width rows. dropped may be empty; dropping every
// feature is an error.
ModelPtr drop_features(const TrainingRecipe& recipe, const Dataset& train,
                       const std::vector<std::string>& dropped, std::uint64_t seed);

// Uniform probability average over the members; classification threshold is
// fixed at 0.5 on the averaged probability.
class EnsembleModel final : public Model {
public:
    explicit EnsembleModel(std::vector<ModelPtr> members);

    double predict_proba(std::span<const double> row) const override;
    const std::vector<std::string>& active_features() const override { return active_; }
    const std::vector<std::string>& input_features() const override {
        return members_.front()->input_features();
    }
    std::string kind() const override { return "ensemble"; }
    nlohmann::ordered_json to_json() const override;
    static std::shared_ptr<EnsembleModel> from_json(const nlohmann::json& j);

    const std::vector<ModelPtr>& members() const { return members_; }

private:
    std::vector<ModelPtr> members_;
    std::vector<std::string> active_;  // union of member active sets, input order
};

ModelPtr ensemble_average(std::vector<ModelPtr> members);

}  // namespace limeout
