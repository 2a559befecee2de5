#include "limeout/lime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace limeout {

double kernel_weight(double distance, double sigma) {
    if (!(sigma > 0.0)) throw ArgumentError("kernel_weight: sigma must be positive");
    return std::exp(-(distance * distance) / (sigma * sigma));
}

Discretizer::Discretizer(FeatureStats stats, int p_quantiles)
    : stats_(std::move(stats)), p_(p_quantiles) {
    if (p_ < 2) throw ArgumentError("discretizer needs at least 2 quantiles");
    cumulative_.resize(stats_.schema.size());
    for (std::size_t f = 0; f < stats_.schema.size(); ++f) {
        if (!stats_.schema.is_categorical(f)) continue;
        double acc = 0.0;
        for (double freq : stats_.categorical[f].frequencies) {
            acc += freq;
            cumulative_[f].push_back(acc);
        }
        if (!cumulative_[f].empty()) cumulative_[f].back() = 1.0;
    }
}

std::size_t Discretizer::n_bins(std::size_t feature) const {
    return stats_.schema.is_categorical(feature) ? stats_.schema.cardinality(feature)
                                                 : static_cast<std::size_t>(p_);
}

std::size_t Discretizer::bin_of(std::size_t feature, double value) const {
    if (stats_.schema.is_categorical(feature)) return static_cast<std::size_t>(value);
    std::size_t bin = 0;
    for (double b : stats_.numerical[feature].boundaries)
        if (value > b) ++bin;
    return bin;
}

double Discretizer::sample_in_bin(std::size_t feature, std::size_t bin, Rng& rng) const {
    const auto& ns = stats_.numerical[feature];
    const auto& bounds = ns.boundaries;
    double lo = bin == 0 ? -std::numeric_limits<double>::infinity() : bounds[bin - 1];
    double hi = bin == bounds.size() ? std::numeric_limits<double>::infinity() : bounds[bin];
    if (lo == hi) return lo;  // collapsed bin (duplicate quantile boundaries)

    double sd = ns.stddev > 0.0 ? ns.stddev : 1.0;
    for (int attempt = 0; attempt < 50; ++attempt) {
        double v = rng.normal(ns.mean, sd);
        if (v > lo && v <= hi) return v;
    }
    double v = rng.normal(ns.mean, sd);
    if (std::isinf(lo)) return std::min(v, hi);
    if (std::isinf(hi)) return std::max(v, lo);
    return std::clamp(v, lo, hi);
}

std::size_t Discretizer::sample_code(std::size_t feature, Rng& rng) const {
    const auto& cum = cumulative_[feature];
    double u = rng.uniform();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t code = static_cast<std::size_t>(std::distance(cum.begin(), it));
    return std::min(code, cum.size() - 1);
}

std::vector<NeighborhoodSample> sample_neighborhood(std::span<const double> x,
                                                    const Discretizer& disc, int n_samples,
                                                    double sigma,
                                                    const std::vector<std::size_t>& explain_idx,
                                                    std::uint64_t seed) {
    if (n_samples < 1) throw ArgumentError("sample_neighborhood: n_samples must be >= 1");
    const std::size_t d = explain_idx.size();
    if (sigma <= 0.0) sigma = 0.75 * static_cast<double>(d);

    std::vector<std::size_t> x_bins(d);
    std::vector<bool> frozen(d);  // degenerate features stay at x's value
    for (std::size_t j = 0; j < d; ++j) {
        std::size_t f = explain_idx[j];
        x_bins[j] = disc.bin_of(f, x[f]);
        frozen[j] = disc.stats().is_degenerate(f);
    }

    std::vector<NeighborhoodSample> out;
    out.reserve(static_cast<std::size_t>(n_samples));

    NeighborhoodSample self;
    self.z_continuous.assign(x.begin(), x.end());
    self.z_binary.assign(d, 1);
    self.weight = 1.0;
    out.push_back(std::move(self));

    Rng rng(seed);
    const auto& schema = disc.schema();
    for (int s = 1; s < n_samples; ++s) {
        NeighborhoodSample ns;
        ns.z_continuous.assign(x.begin(), x.end());
        ns.z_binary.assign(d, 0);
        std::size_t mismatches = 0;
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t f = explain_idx[j];
            if (frozen[j]) {
                ns.z_binary[j] = 1;
                continue;
            }
            if (schema.is_categorical(f)) {
                std::size_t code = disc.sample_code(f, rng);
                ns.z_continuous[f] = static_cast<double>(code);
                ns.z_binary[j] = code == x_bins[j] ? 1 : 0;
            } else {
                std::size_t bin = rng.below(disc.n_bins(f));
                ns.z_continuous[f] = disc.sample_in_bin(f, bin, rng);
                ns.z_binary[j] = bin == x_bins[j] ? 1 : 0;
            }
            if (!ns.z_binary[j]) ++mismatches;
        }
        ns.weight = kernel_weight(std::sqrt(static_cast<double>(mismatches)), sigma);
        out.push_back(std::move(ns));
    }
    return out;
}

LocalExplanation fit_surrogate(const std::vector<NeighborhoodSample>& samples,
                               const std::vector<double>& targets, double ridge_lambda) {
    if (samples.size() != targets.size())
        throw ArgumentError("fit_surrogate: samples/targets size mismatch");
    if (samples.empty()) throw ArgumentError("fit_surrogate: no samples");
    const std::size_t n = samples.size();
    const std::size_t d = samples.front().z_binary.size();
    if (n < d + 1)
        throw ArgumentError("fit_surrogate: need at least d+1 samples for d features");
    if (ridge_lambda < 0.0) throw ArgumentError("fit_surrogate: negative ridge_lambda");

    Eigen::MatrixXd X(n, d + 1);
    Eigen::VectorXd y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < d; ++j)
            X(i, j + 1) = static_cast<double>(samples[i].z_binary[j]);
        y(i) = targets[i];
        w(i) = samples[i].weight;
    }

    LocalExplanation ex;
    Eigen::VectorXd beta;
    if (ridge_lambda > 0.0) {
        Eigen::MatrixXd a = X.transpose() * w.asDiagonal() * X;
        for (std::size_t j = 1; j <= d; ++j) a(j, j) += ridge_lambda;  // intercept unpenalized
        beta = a.ldlt().solve(X.transpose() * (w.asDiagonal() * y));
    } else {
        // Weighted least squares via sqrt(W); rank-revealing solve gives the
        // minimum-norm answer on singular systems.
        Eigen::VectorXd sw = w.array().sqrt();
        Eigen::MatrixXd xs = sw.asDiagonal() * X;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xs);
        beta = cod.solve((sw.array() * y.array()).matrix());
        ex.rank_deficient = cod.rank() < static_cast<Eigen::Index>(d + 1);
    }

    ex.intercept = beta(0);
    ex.coefficients.resize(d);
    for (std::size_t j = 0; j < d; ++j) ex.coefficients[j] = beta(j + 1);

    double se = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = ex.intercept;
        for (std::size_t j = 0; j < d; ++j)
            if (samples[i].z_binary[j]) pred += ex.coefficients[j];
        double r = pred - targets[i];
        se += samples[i].weight * r * r;
        wsum += samples[i].weight;
    }
    ex.fit_error = wsum > 0.0 ? se / wsum : 0.0;
    return ex;
}

std::vector<std::pair<std::string, double>> LocalExplanation::contributions() const {
    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(coefficients[a]) > std::abs(coefficients[b]);
    });
    std::vector<std::pair<std::string, double>> out;
    out.reserve(order.size());
    for (std::size_t i : order) out.emplace_back(features[i], coefficients[i]);
    return out;
}

LocalExplanation explain_instance(const Model& model, std::span<const double> x,
                                  const Discretizer& disc, const LimeConfig& cfg) {
    const auto& schema = disc.schema();
    const auto& input = model.input_features();
    if (input.size() != schema.size())
        throw SchemaError("explain_instance: model input width does not match discretizer");
    for (std::size_t f = 0; f < input.size(); ++f)
        if (input[f] != schema.features[f].name)
            throw SchemaError("explain_instance: model inputs do not match discretizer schema");

    const std::vector<std::string>& names =
        cfg.explain_features ? *cfg.explain_features : model.active_features();
    std::vector<std::size_t> explain_idx;
    explain_idx.reserve(names.size());
    for (const auto& name : names) {
        auto idx = schema.index_of(name);
        if (!idx) throw SchemaError("explain_instance: unknown feature '" + name + "'");
        explain_idx.push_back(*idx);
    }

    double sigma = cfg.sigma > 0.0 ? cfg.sigma : 0.75 * static_cast<double>(explain_idx.size());
    auto samples = sample_neighborhood(x, disc, cfg.n_samples, sigma, explain_idx, cfg.seed);
    std::vector<double> targets(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        targets[i] = model.predict_proba(samples[i].z_continuous);

    LocalExplanation ex = fit_surrogate(samples, targets, cfg.ridge_lambda);
    ex.instance.assign(x.begin(), x.end());
    ex.predicted_class_probability = targets[0];
    ex.features.clear();
    for (std::size_t f : explain_idx) ex.features.push_back(schema.features[f].name);
    ex.config = cfg;
    ex.config.sigma = sigma;
    return ex;
}

}  // namespace limeout
