#include "limeout/global_explain.hpp"

#include <algorithm>
#include <cmath>

#include "limeout/parallel.hpp"

namespace limeout {

std::string to_string(Fairness f) {
    switch (f) {
        case Fairness::Fair: return "fair";
        case Fairness::SingleSensitive: return "single-sensitive";
        case Fairness::Unfair: return "unfair";
    }
    return "unknown";
}

double GlobalExplanation::aggregate_of(std::string_view feature) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i] == feature) return aggregates[i];
    throw SchemaError("no aggregate for feature '" + std::string(feature) + "'");
}

std::size_t GlobalExplanation::rank_of(std::string_view feature) const {
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (ranking[i] == feature) return i;
    return static_cast<std::size_t>(-1);
}

std::vector<std::size_t> submodular_pick(const std::vector<std::vector<double>>& abs_weights,
                                         std::size_t budget) {
    if (budget < 1) throw ArgumentError("submodular_pick: budget must be >= 1");
    const std::size_t n = abs_weights.size();
    if (n == 0) return {};
    const std::size_t d = abs_weights.front().size();

    std::vector<double> importance(d, 0.0);
    for (const auto& row : abs_weights) {
        if (row.size() != d) throw ArgumentError("submodular_pick: ragged weight matrix");
        for (std::size_t j = 0; j < d; ++j) importance[j] += std::abs(row[j]);
    }
    for (double& v : importance) v = std::sqrt(v);

    const std::size_t rounds = std::min(budget, n);
    std::vector<bool> covered(d, false), picked(n, false);
    std::vector<std::size_t> out;
    out.reserve(rounds);
    for (std::size_t round = 0; round < rounds; ++round) {
        double best_gain = -1.0;
        std::size_t best = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (picked[i]) continue;
            double gain = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                if (!covered[j] && std::abs(abs_weights[i][j]) > 0.0) gain += importance[j];
            if (gain > best_gain) {  // ties keep the lowest index
                best_gain = gain;
                best = i;
            }
        }
        picked[best] = true;
        out.push_back(best);
        for (std::size_t j = 0; j < d; ++j)
            if (std::abs(abs_weights[best][j]) > 0.0) covered[j] = true;
    }
    return out;
}

GlobalExplanation lime_global(const Model& model, const Dataset& data, const Discretizer& disc,
                              const GlobalConfig& cfg) {
    if (data.n_rows() == 0) throw ArgumentError("lime_global: empty candidate data");

    // Candidate rows: everything up to the cap, otherwise a seeded subsample.
    std::vector<std::size_t> candidates;
    if (data.n_rows() <= cfg.candidate_cap) {
        candidates.resize(data.n_rows());
        for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
    } else {
        std::vector<std::size_t> all(data.n_rows());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        Rng rng(derive_seed(cfg.seed, "candidates"));
        for (std::size_t i = 0; i < cfg.candidate_cap; ++i) {
            std::size_t j = i + rng.below(all.size() - i);
            std::swap(all[i], all[j]);
        }
        candidates.assign(all.begin(), all.begin() + cfg.candidate_cap);
        std::sort(candidates.begin(), candidates.end());
    }

    std::vector<LocalExplanation> explanations(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
        LimeConfig lc = cfg.lime;
        lc.seed = derive_seed(cfg.seed, "candidate-lime", candidates[i]);
        explanations[i] = explain_instance(model, data.row(candidates[i]), disc, lc);
    });

    const std::vector<std::string>& features = explanations.front().features;
    const std::size_t d = features.size();

    std::vector<std::vector<double>> abs_w(explanations.size(), std::vector<double>(d));
    for (std::size_t i = 0; i < explanations.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            abs_w[i][j] = std::abs(explanations[i].coefficients[j]);

    std::vector<std::size_t> picked_local;
    if (cfg.random_pick) {
        std::size_t take = std::min(cfg.pick_budget, explanations.size());
        std::vector<std::size_t> all(explanations.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        Rng rng(derive_seed(cfg.seed, "random-pick"));
        for (std::size_t i = 0; i < take; ++i) {
            std::size_t j = i + rng.below(all.size() - i);
            std::swap(all[i], all[j]);
        }
        picked_local.assign(all.begin(), all.begin() + take);
        std::sort(picked_local.begin(), picked_local.end());
    } else {
        picked_local = submodular_pick(abs_w, cfg.pick_budget);
    }

    GlobalExplanation g;
    g.features = features;
    g.aggregates.assign(d, 0.0);
    for (std::size_t i : picked_local) {
        g.picked_instances.push_back(candidates[i]);
        for (std::size_t j = 0; j < d; ++j)
            g.aggregates[j] += cfg.absolute_aggregation ? abs_w[i][j]
                                                        : explanations[i].coefficients[j];
    }

    std::vector<std::size_t> order(d);
    for (std::size_t j = 0; j < d; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(g.aggregates[a]) > std::abs(g.aggregates[b]);
    });
    for (std::size_t j : order) g.ranking.push_back(features[j]);
    g.config = cfg;
    return g;
}

FairnessVerdict assess_fairness(const GlobalExplanation& g,
                                const std::vector<std::string>& sensitive, int k) {
    if (k < 1) throw ArgumentError("assess_fairness: k must be >= 1");
    FairnessVerdict v;
    v.k = k;
    const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), g.ranking.size());
    for (std::size_t i = 0; i < top; ++i)
        if (std::find(sensitive.begin(), sensitive.end(), g.ranking[i]) != sensitive.end())
            v.sensitive_in_top_k.push_back(g.ranking[i]);
    v.verdict = v.sensitive_in_top_k.size() >= 2   ? Fairness::Unfair
                : v.sensitive_in_top_k.size() == 1 ? Fairness::SingleSensitive
                                                   : Fairness::Fair;
    return v;
}

}  // namespace limeout
