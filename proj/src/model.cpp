#include "limeout/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "limeout/compose.hpp"
#include "limeout/forest.hpp"
#include "limeout/logistic.hpp"

namespace limeout {

std::vector<double> Model::predict_proba_all(const Dataset& d) const {
    std::vector<double> out(d.n_rows());
    for (std::size_t r = 0; r < d.n_rows(); ++r) out[r] = predict_proba(d.row(r));
    return out;
}

EvalReport eval_from_counts(long tp, long fp, long tn, long fn) {
    EvalReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    long total = tp + fp + tn + fn;
    r.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
    long denom = 2 * tp + fp + fn;
    r.f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
    return r;
}

EvalReport evaluate(const Model& m, const Dataset& test) {
    if (test.n_rows() == 0) throw ArgumentError("evaluate: empty test set");
    long tp = 0, fp = 0, tn = 0, fn = 0;
    const double threshold = m.decision_threshold();
    for (std::size_t r = 0; r < test.n_rows(); ++r) {
        int pred = m.predict_proba(test.row(r)) >= threshold ? 1 : 0;
        int truth = test.labels[r];
        if (pred == 1 && truth == 1)
            ++tp;
        else if (pred == 1)
            ++fp;
        else if (truth == 1)
            ++fn;
        else
            ++tn;
    }
    return eval_from_counts(tp, fp, tn, fn);
}

ModelPtr tune_threshold(ModelPtr m, const Dataset& val, bool* single_class_warning) {
    if (single_class_warning) *single_class_warning = false;
    long positives = 0;
    for (int y : val.labels) positives += y;
    if (positives == 0 || positives == static_cast<long>(val.n_rows())) {
        m->set_decision_threshold(0.5);
        if (single_class_warning) *single_class_warning = true;
        return m;
    }

    std::vector<double> probs = m->predict_proba_all(val);
    std::vector<double> candidates = probs;
    candidates.push_back(0.5);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Sweep thresholds descending; the prediction set grows monotonically, so
    // counts update incrementally. Order rows by probability descending.
    std::vector<std::size_t> order(val.n_rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    double best_f1 = -1.0;
    double best_threshold = 0.5;
    long tp = 0, fp = 0;
    std::size_t consumed = 0;
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        double t = *it;
        while (consumed < order.size() && probs[order[consumed]] >= t) {
            if (val.labels[order[consumed]] == 1)
                ++tp;
            else
                ++fp;
            ++consumed;
        }
        long fn = positives - tp;
        long denom = 2 * tp + fp + fn;
        double f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
        bool better = f1 > best_f1 + 1e-12;
        bool tie = std::abs(f1 - best_f1) <= 1e-12;
        if (better || (tie && std::abs(t - 0.5) < std::abs(best_threshold - 0.5))) {
            best_f1 = f1;
            best_threshold = t;
        }
    }
    m->set_decision_threshold(best_threshold);
    return m;
}

ModelPtr model_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "logistic") return LogisticModel::from_json(j);
    if (kind == "forest") return ForestModel::from_json(j);
    if (kind == "dropout-wrapper") return DropoutModel::from_json(j);
    if (kind == "ensemble") return EnsembleModel::from_json(j);
    throw ParseError("unknown model kind '" + kind + "'");
}

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << m.to_json().dump(2) << "\n";
}

ModelPtr load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file " + path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace limeout
