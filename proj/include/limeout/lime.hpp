#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limeout/model.hpp"
#include "limeout/random.hpp"
#include "limeout/stats.hpp"

namespace limeout {

// Exponential proximity kernel exp(-distance^2 / sigma^2).
double kernel_weight(double distance, double sigma);

// Maps numerical values to quantile bins and categorical values to their
// codes; the bin vocabulary is what neighborhood samples are drawn from.
class Discretizer {
public:
    Discretizer(FeatureStats stats, int p_quantiles);

    const FeatureSchema& schema() const { return stats_.schema; }
    const FeatureStats& stats() const { return stats_; }
    int p() const { return p_; }

    // Bin count for a feature: p for numerical, cardinality for categorical.
    std::size_t n_bins(std::size_t feature) const;

    // Bin index of a value; for numericals this is the count of boundaries
    // strictly below the value, so a value always falls in the bin it is
    // assigned.
    std::size_t bin_of(std::size_t feature, double value) const;

    // In-bin continuous value: truncated normal around the feature's
    // mean/stddev, clipped into the bin after bounded rejection.
    double sample_in_bin(std::size_t feature, std::size_t bin, Rng& rng) const;

    // Code drawn from the training frequency distribution.
    std::size_t sample_code(std::size_t feature, Rng& rng) const;

private:
    FeatureStats stats_;
    int p_;
    std::vector<std::vector<double>> cumulative_;  // per categorical feature
};

struct NeighborhoodSample {
    std::vector<double> z_continuous;   // full-width model-space row
    std::vector<std::uint8_t> z_binary; // per explained feature, 1 = matches x
    double weight = 1.0;
};

struct LimeConfig {
    int n_samples = 5000;
    double sigma = 0.0;        // <= 0 selects 0.75 * (explained feature count)
    double ridge_lambda = 1.0;
    std::uint64_t seed = 0;
    // Explain these features instead of the model's active set (used to probe
    // dropped features of a wrapper, which should come out near zero).
    std::optional<std::vector<std::string>> explain_features;
};

struct LocalExplanation {
    std::vector<double> instance;
    double predicted_class_probability = 0.0;
    std::vector<std::string> features;      // explained features, schema order
    std::vector<double> coefficients;       // aligned with features
    double intercept = 0.0;
    double fit_error = 0.0;                 // weighted mean squared residual
    bool rank_deficient = false;
    LimeConfig config;

    // (feature, coefficient) sorted by |coefficient| descending, ties in
    // feature order.
    std::vector<std::pair<std::string, double>> contributions() const;
};

// Draws the discretized neighborhood of x. The first sample is x itself
// (all-ones binary vector, weight 1). explain_idx selects the perturbed
// features; everything else is held at x's value. Degenerate features are
// held fixed and marked as matching.
std::vector<NeighborhoodSample> sample_neighborhood(std::span<const double> x,
                                                    const Discretizer& disc, int n_samples,
                                                    double sigma,
                                                    const std::vector<std::size_t>& explain_idx,
                                                    std::uint64_t seed);

// Weighted ridge fit of targets on the binary vectors, intercept unpenalized.
// A singular system at lambda 0 is solved in the minimum-norm sense and
// flagged. Requires at least d+1 samples.
LocalExplanation fit_surrogate(const std::vector<NeighborhoodSample>& samples,
                               const std::vector<double>& targets, double ridge_lambda);

// Full pipeline for one instance: sample, query the model, fit.
LocalExplanation explain_instance(const Model& model, std::span<const double> x,
                                  const Discretizer& disc, const LimeConfig& cfg);

}  // namespace limeout
