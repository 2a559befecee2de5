#include "limeout/smote.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "limeout/parallel.hpp"
#include "limeout/random.hpp"

namespace limeout {

namespace {

double mixed_distance_sq(std::span<const double> a, std::span<const double> b,
                         const std::vector<bool>& is_cat) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_cat[i]) {
            if (a[i] != b[i]) d2 += 1.0;
        } else {
            double diff = a[i] - b[i];
            d2 += diff * diff;
        }
    }
    return d2;
}

}  // namespace

Dataset smote_oversample(const Dataset& train, int k_neighbors, std::uint64_t seed) {
    if (k_neighbors < 1) throw ArgumentError("smote: k_neighbors must be positive");

    std::size_t n1 = 0;
    for (int y : train.labels) n1 += static_cast<std::size_t>(y);
    std::size_t n0 = train.n_rows() - n1;
    if (n0 == 0 || n1 == 0) throw BalanceError("smote: input contains a single class");
    if (n0 == n1) return train;

    const int minority = n1 < n0 ? 1 : 0;
    const std::size_t minority_count = std::min(n0, n1);
    const std::size_t need = (n0 > n1 ? n0 : n1) - minority_count;
    if (minority_count <= static_cast<std::size_t>(k_neighbors))
        throw ArgumentError("smote: minority class must be larger than k_neighbors");

    std::vector<std::size_t> minority_rows;
    minority_rows.reserve(minority_count);
    for (std::size_t r = 0; r < train.n_rows(); ++r)
        if (train.labels[r] == minority) minority_rows.push_back(r);

    std::vector<bool> is_cat(train.n_features());
    for (std::size_t f = 0; f < train.n_features(); ++f)
        is_cat[f] = train.schema.is_categorical(f);

    // k nearest minority neighbors per minority row, brute force.
    const auto k = static_cast<std::size_t>(k_neighbors);
    std::vector<std::vector<std::size_t>> neighbors(minority_count);
    parallel_for(minority_count, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> dists;
        dists.reserve(minority_count - 1);
        auto a = train.row(minority_rows[i]);
        for (std::size_t j = 0; j < minority_count; ++j) {
            if (j == i) continue;
            dists.emplace_back(mixed_distance_sq(a, train.row(minority_rows[j]), is_cat), j);
        }
        std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
        neighbors[i].reserve(k);
        for (std::size_t m = 0; m < k; ++m) neighbors[i].push_back(dists[m].second);
    });

    Dataset out = train;
    out.values.reserve((train.n_rows() + need) * train.n_features());
    out.labels.reserve(train.n_rows() + need);
    Rng rng(seed);
    for (std::size_t s = 0; s < need; ++s) {
        std::size_t i = s % minority_count;  // round-robin over minority seeds
        auto base = train.row(minority_rows[i]);
        auto nn = train.row(minority_rows[neighbors[i][rng.below(k)]]);
        double gap = rng.uniform();
        for (std::size_t f = 0; f < train.n_features(); ++f)
            out.values.push_back(is_cat[f] ? base[f] : base[f] + gap * (nn[f] - base[f]));
        out.labels.push_back(minority);
    }
    return out;
}

}  // namespace limeout
