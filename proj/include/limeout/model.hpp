#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "limeout/dataset.hpp"

namespace limeout {

// A trained probabilistic binary classifier. predict_proba returns the
// class-1 probability for a row whose layout matches input_features().
// Models are immutable once trained (apart from the decision threshold,
// which is set during the training flow) and safe to share across threads.
class Model {
public:
    virtual ~Model() = default;

    virtual double predict_proba(std::span<const double> row) const = 0;

    // Features the model actually reads.
    virtual const std::vector<std::string>& active_features() const = 0;

    // Layout of the rows predict_proba accepts; for wrappers this is wider
    // than the active set.
    virtual const std::vector<std::string>& input_features() const {
        return active_features();
    }

    virtual std::string kind() const = 0;
    virtual nlohmann::ordered_json to_json() const = 0;

    double decision_threshold() const { return threshold_; }
    void set_decision_threshold(double t) { threshold_ = t; }

    bool converged() const { return converged_; }

    std::vector<double> predict_proba_all(const Dataset& d) const;

protected:
    double threshold_ = 0.5;
    bool converged_ = true;
};

using ModelPtr = std::shared_ptr<Model>;

struct EvalReport {
    double accuracy = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Confusion counts at the model's decision threshold (positive iff
// probability >= threshold).
EvalReport evaluate(const Model& m, const Dataset& test);

// F1 and accuracy from raw counts; F1 is 0 when no positive predictions or
// labels exist.
EvalReport eval_from_counts(long tp, long fp, long tn, long fn);

// Sets m's threshold to the F1-maximizing candidate on val. Candidates are
// the distinct predicted probabilities plus the 0.5 default; ties resolve
// toward 0.5. A single-class val leaves the threshold at 0.5 and reports a
// warning through the optional flag.
ModelPtr tune_threshold(ModelPtr m, const Dataset& val, bool* single_class_warning = nullptr);

// Model deserialization (inverse of to_json for every model kind).
ModelPtr model_from_json(const nlohmann::json& j);

void save_model(const Model& m, const std::string& path);
ModelPtr load_model(const std::string& path);

}  // namespace limeout
