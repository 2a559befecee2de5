#pragma once

#include "limeout/lime.hpp"

namespace limeout {

struct GlobalConfig {
    std::size_t candidate_cap = 1000;  // explained instances; seeded subsample beyond
    std::size_t pick_budget = 50;
    bool random_pick = false;          // replace submodular pick with a random draw
    bool absolute_aggregation = false; // aggregate |coefficients| instead of signed sums
    LimeConfig lime;
    std::uint64_t seed = 0;
};

struct GlobalExplanation {
    std::vector<std::string> features;    // explained features, schema order
    std::vector<double> aggregates;       // signed sums over picked instances
    std::vector<std::string> ranking;     // features by |aggregate| descending
    std::vector<std::size_t> picked_instances;  // row indices into the candidate data
    GlobalConfig config;

    double aggregate_of(std::string_view feature) const;
    // Rank position of a feature in [0, |ranking|), or npos when absent.
    std::size_t rank_of(std::string_view feature) const;
};

enum class Fairness { Fair, SingleSensitive, Unfair };

struct FairnessVerdict {
    std::vector<std::string> sensitive_in_top_k;  // ranking order
    int k = 10;
    Fairness verdict = Fairness::Fair;
};

std::string to_string(Fairness f);

// Greedy weighted feature coverage over a matrix of |coefficient| values.
// Feature importance is sqrt of the column sum; each round adds the instance
// whose uncovered features carry the most importance, lowest index on ties,
// until min(budget, n) instances are picked.
std::vector<std::size_t> submodular_pick(const std::vector<std::vector<double>>& abs_weights,
                                         std::size_t budget);

// Explains candidate instances of `data` (all rows up to the cap, seeded
// subsample beyond), picks a diverse subset, and aggregates their local
// coefficients into a global per-feature ranking.
GlobalExplanation lime_global(const Model& model, const Dataset& data, const Discretizer& disc,
                              const GlobalConfig& cfg);

// Intersects the top-k ranking with the sensitive set: two or more hits are
// unfair, exactly one is single-sensitive, none is fair.
FairnessVerdict assess_fairness(const GlobalExplanation& g,
                                const std::vector<std::string>& sensitive, int k);

}  // namespace limeout
