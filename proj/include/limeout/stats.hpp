#pragma once

#include <string>
#include <vector>

#include "limeout/dataset.hpp"

namespace limeout {

// Per-feature training statistics backing discretization and neighborhood
// sampling. Quantile boundaries use linear-interpolation sample quantiles.
struct FeatureStats {
    struct NumericalStats {
        double mean = 0.0;
        double stddev = 0.0;                  // sample standard deviation
        std::vector<double> boundaries;       // p-1 non-decreasing cut points
        bool degenerate = false;              // constant column
    };
    struct CategoricalStats {
        std::vector<double> frequencies;      // per code, sums to 1
    };

    FeatureSchema schema;
    int p_quantiles = 4;
    std::vector<NumericalStats> numerical;    // indexed by feature, unused slots for cat
    std::vector<CategoricalStats> categorical;

    bool is_degenerate(std::size_t feature) const {
        return !schema.is_categorical(feature) && numerical[feature].degenerate;
    }
};

// Linear-interpolation sample quantile of sorted data at fraction q in [0,1].
double sample_quantile(const std::vector<double>& sorted, double q);

FeatureStats compute_stats(const Dataset& train, int p_quantiles = 4);

// Names of non-target features whose association with any target feature is
// at least `threshold`. Association is |Pearson correlation| for
// numerical-numerical pairs and Cramer's V when a categorical feature is
// involved (numerical sides are quartile-binned first).
std::vector<std::string> correlated_features(const Dataset& d,
                                             const std::vector<std::string>& targets,
                                             double threshold);

}  // namespace limeout
