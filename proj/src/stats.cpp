#include "limeout/stats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace limeout {

double sample_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw ArgumentError("quantile of empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

FeatureStats compute_stats(const Dataset& train, int p_quantiles) {
    if (train.n_rows() == 0) throw ArgumentError("compute_stats on empty dataset");
    if (p_quantiles < 2) throw ArgumentError("p_quantiles must be at least 2");

    FeatureStats stats;
    stats.schema = train.schema;
    stats.p_quantiles = p_quantiles;
    stats.numerical.resize(train.n_features());
    stats.categorical.resize(train.n_features());

    const std::size_t n = train.n_rows();
    for (std::size_t f = 0; f < train.n_features(); ++f) {
        if (train.schema.is_categorical(f)) {
            auto& cs = stats.categorical[f];
            cs.frequencies.assign(train.schema.cardinality(f), 0.0);
            for (std::size_t r = 0; r < n; ++r)
                cs.frequencies[static_cast<std::size_t>(train.at(r, f))] += 1.0;
            for (auto& v : cs.frequencies) v /= static_cast<double>(n);
            continue;
        }
        auto& ns = stats.numerical[f];
        std::vector<double> col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = train.at(r, f);
        double sum = 0.0;
        for (double v : col) sum += v;
        ns.mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (double v : col) ss += (v - ns.mean) * (v - ns.mean);
        ns.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

        std::sort(col.begin(), col.end());
        ns.degenerate = col.front() == col.back();
        ns.boundaries.resize(p_quantiles - 1);
        if (ns.degenerate) {
            // Quantile discretization is undefined on a constant column;
            // collapse every boundary to the single value and flag it.
            std::fill(ns.boundaries.begin(), ns.boundaries.end(), col.front());
        } else {
            for (int j = 1; j < p_quantiles; ++j)
                ns.boundaries[j - 1] =
                    sample_quantile(col, static_cast<double>(j) / p_quantiles);
        }
    }
    return stats;
}

namespace {

double pearson_abs(const Dataset& d, std::size_t a, std::size_t b) {
    const std::size_t n = d.n_rows();
    double ma = 0, mb = 0;
    for (std::size_t r = 0; r < n; ++r) {
        ma += d.at(r, a);
        mb += d.at(r, b);
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t r = 0; r < n; ++r) {
        double da = d.at(r, a) - ma;
        double db = d.at(r, b) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return std::abs(sab / std::sqrt(saa * sbb));
}

// Level index per row for a feature: categorical codes directly, numerical
// values binned into quartiles.
std::vector<int> levels_of(const Dataset& d, const FeatureStats& stats, std::size_t f,
                           int& n_levels) {
    const std::size_t n = d.n_rows();
    std::vector<int> out(n);
    if (d.schema.is_categorical(f)) {
        n_levels = static_cast<int>(d.schema.cardinality(f));
        for (std::size_t r = 0; r < n; ++r) out[r] = static_cast<int>(d.at(r, f));
        return out;
    }
    const auto& bounds = stats.numerical[f].boundaries;
    n_levels = static_cast<int>(bounds.size()) + 1;
    for (std::size_t r = 0; r < n; ++r) {
        double v = d.at(r, f);
        int bin = 0;
        for (double b : bounds)
            if (v > b) ++bin;
        out[r] = bin;
    }
    return out;
}

double cramers_v(const Dataset& d, const FeatureStats& stats, std::size_t a, std::size_t b) {
    int la = 0, lb = 0;
    std::vector<int> xa = levels_of(d, stats, a, la);
    std::vector<int> xb = levels_of(d, stats, b, lb);
    const std::size_t n = d.n_rows();

    std::vector<double> table(static_cast<std::size_t>(la) * lb, 0.0);
    std::vector<double> row_sum(la, 0.0), col_sum(lb, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        table[static_cast<std::size_t>(xa[r]) * lb + xb[r]] += 1.0;
        row_sum[xa[r]] += 1.0;
        col_sum[xb[r]] += 1.0;
    }
    int ra = 0, cb = 0;
    for (double v : row_sum)
        if (v > 0) ++ra;
    for (double v : col_sum)
        if (v > 0) ++cb;
    int dof = std::min(ra - 1, cb - 1);
    if (dof <= 0) return 0.0;

    double chi2 = 0.0;
    for (int i = 0; i < la; ++i)
        for (int j = 0; j < lb; ++j) {
            double expected = row_sum[i] * col_sum[j] / static_cast<double>(n);
            if (expected <= 0) continue;
            double diff = table[static_cast<std::size_t>(i) * lb + j] - expected;
            chi2 += diff * diff / expected;
        }
    return std::sqrt(chi2 / (static_cast<double>(n) * dof));
}

}  // namespace

std::vector<std::string> correlated_features(const Dataset& d,
                                             const std::vector<std::string>& targets,
                                             double threshold) {
    if (targets.empty()) return {};
    std::vector<std::size_t> target_idx;
    for (const auto& t : targets) {
        auto idx = d.schema.index_of(t);
        if (!idx) throw SchemaError("correlated_features: unknown feature '" + t + "'");
        target_idx.push_back(*idx);
    }
    std::unordered_set<std::size_t> target_set(target_idx.begin(), target_idx.end());

    FeatureStats stats = compute_stats(d, 4);
    std::vector<std::string> out;
    for (std::size_t f = 0; f < d.n_features(); ++f) {
        if (target_set.count(f)) continue;
        for (std::size_t t : target_idx) {
            bool both_numerical =
                !d.schema.is_categorical(f) && !d.schema.is_categorical(t);
            double assoc = both_numerical ? pearson_abs(d, f, t) : cramers_v(d, stats, f, t);
            if (assoc >= threshold) {
                out.push_back(d.schema.features[f].name);
                break;
            }
        }
    }
    return out;
}

}  // namespace limeout
