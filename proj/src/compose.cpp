#include "limeout/compose.hpp"

#include <algorithm>
#include <unordered_set>

#include "limeout/random.hpp"

namespace limeout {

ModelPtr TrainingRecipe::train(const Dataset& train_data, std::uint64_t seed) const {
    ModelPtr m;
    if (kind == "logistic")
        m = train_logistic(train_data, logistic, derive_seed(seed, "fit"));
    else if (kind == "forest")
        m = train_forest(train_data, forest, derive_seed(seed, "fit"));
    else
        throw ConfigError("recipe.kind must be 'logistic' or 'forest', got '" + kind + "'");
    if (tune) m = tune_threshold(m, train_data);
    return m;
}

DropoutModel::DropoutModel(ModelPtr inner, std::vector<std::string> full_features,
                           std::vector<std::size_t> keep_indices,
                           std::vector<std::string> dropped)
    : inner_(std::move(inner)),
      full_features_(std::move(full_features)),
      keep_indices_(std::move(keep_indices)),
      dropped_(std::move(dropped)) {
    threshold_ = inner_->decision_threshold();
    converged_ = inner_->converged();
}

double DropoutModel::predict_proba(std::span<const double> row) const {
    std::vector<double> projected;
    projected.reserve(keep_indices_.size());
    for (std::size_t i : keep_indices_) projected.push_back(row[i]);
    return inner_->predict_proba(projected);
}

nlohmann::ordered_json DropoutModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "dropout-wrapper";
    j["decision_threshold"] = threshold_;
    j["full_features"] = full_features_;
    j["keep_indices"] = keep_indices_;
    j["dropped"] = dropped_;
    j["inner"] = inner_->to_json();
    return j;
}

std::shared_ptr<DropoutModel> DropoutModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<DropoutModel>(
        model_from_json(j.at("inner")), j.at("full_features").get<std::vector<std::string>>(),
        j.at("keep_indices").get<std::vector<std::size_t>>(),
        j.at("dropped").get<std::vector<std::string>>());
    m->set_decision_threshold(j.at("decision_threshold").get<double>());
    return m;
}

ModelPtr drop_features(const TrainingRecipe& recipe, const Dataset& train,
                       const std::vector<std::string>& dropped, std::uint64_t seed) {
    std::unordered_set<std::string> drop_set;
    for (const auto& name : dropped) {
        if (!train.schema.index_of(name))
            throw SchemaError("drop_features: unknown feature '" + name + "'");
        drop_set.insert(name);
    }
    if (drop_set.size() >= train.n_features())
        throw ArgumentError("drop_features: cannot drop every feature");

    std::vector<std::string> unique_dropped(drop_set.begin(), drop_set.end());
    Dataset narrowed =
        unique_dropped.empty() ? train : drop_columns(train, unique_dropped);
    ModelPtr inner = recipe.train(narrowed, seed);

    std::vector<std::string> full;
    std::vector<std::size_t> keep;
    std::vector<std::string> dropped_ordered;  // schema order
    for (std::size_t f = 0; f < train.n_features(); ++f) {
        const std::string& name = train.schema.features[f].name;
        full.push_back(name);
        if (drop_set.count(name))
            dropped_ordered.push_back(name);
        else
            keep.push_back(f);
    }
    return std::make_shared<DropoutModel>(std::move(inner), std::move(full), std::move(keep),
                                          std::move(dropped_ordered));
}

EnsembleModel::EnsembleModel(std::vector<ModelPtr> members) : members_(std::move(members)) {
    if (members_.empty()) throw ArgumentError("ensemble requires at least one member");
    const auto& input = members_.front()->input_features();
    for (const auto& m : members_)
        if (m->input_features() != input)
            throw ArgumentError("ensemble members must accept identical inputs");
    std::unordered_set<std::string> used;
    for (const auto& m : members_)
        for (const auto& f : m->active_features()) used.insert(f);
    for (const auto& f : input)
        if (used.count(f)) active_.push_back(f);
    threshold_ = 0.5;
}

double EnsembleModel::predict_proba(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& m : members_) sum += m->predict_proba(row);
    return sum / static_cast<double>(members_.size());
}

nlohmann::ordered_json EnsembleModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "ensemble";
    j["decision_threshold"] = threshold_;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const auto& m : members_) members.push_back(m->to_json());
    j["members"] = std::move(members);
    return j;
}

std::shared_ptr<EnsembleModel> EnsembleModel::from_json(const nlohmann::json& j) {
    std::vector<ModelPtr> members;
    for (const auto& mj : j.at("members")) members.push_back(model_from_json(mj));
    auto m = std::make_shared<EnsembleModel>(std::move(members));
    m->set_decision_threshold(j.at("decision_threshold").get<double>());
    return m;
}

ModelPtr ensemble_average(std::vector<ModelPtr> members) {
    return std::make_shared<EnsembleModel>(std::move(members));
}

}  // namespace limeout
