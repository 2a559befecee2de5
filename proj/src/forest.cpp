#include "limeout/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "limeout/parallel.hpp"
#include "limeout/random.hpp"

namespace limeout {

namespace {

// Split search runs on pre-binned values: thresholds are fixed per feature
// before any tree is grown, so a node scan is one histogram pass.
struct BinnedData {
    std::size_t n_rows = 0, n_features = 0;
    std::vector<std::uint16_t> bins;             // row-major
    std::vector<std::vector<double>> thresholds; // thresholds[f][b] splits bin<=b from bin>b

    std::uint16_t bin(std::size_t r, std::size_t f) const { return bins[r * n_features + f]; }
};

BinnedData bin_dataset(const Dataset& train, int max_bins) {
    BinnedData out;
    out.n_rows = train.n_rows();
    out.n_features = train.n_features();
    out.bins.resize(out.n_rows * out.n_features);
    out.thresholds.resize(out.n_features);

    std::vector<double> col(out.n_rows);
    for (std::size_t f = 0; f < out.n_features; ++f) {
        for (std::size_t r = 0; r < out.n_rows; ++r) col[r] = train.at(r, f);
        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

        auto& th = out.thresholds[f];
        if (sorted.size() <= 1) {
            // constant column: never splittable
        } else if (sorted.size() <= static_cast<std::size_t>(max_bins)) {
            th.reserve(sorted.size() - 1);
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
                th.push_back(0.5 * (sorted[i] + sorted[i + 1]));
        } else {
            th.reserve(max_bins - 1);
            for (int b = 1; b < max_bins; ++b) {
                double q = static_cast<double>(b) / max_bins;
                double pos = q * static_cast<double>(sorted.size() - 1);
                auto lo = static_cast<std::size_t>(pos);
                double v = sorted[lo] + (pos - static_cast<double>(lo)) *
                                            (lo + 1 < sorted.size() ? sorted[lo + 1] - sorted[lo]
                                                                    : 0.0);
                if (th.empty() || v > th.back()) th.push_back(v);
            }
        }
        for (std::size_t r = 0; r < out.n_rows; ++r) {
            auto it = std::upper_bound(th.begin(), th.end(), col[r]);
            out.bins[r * out.n_features + f] =
                static_cast<std::uint16_t>(std::distance(th.begin(), it));
        }
    }
    return out;
}

struct TreeBuilder {
    const BinnedData& data;
    const std::vector<int>& labels;
    const ForestHyper& hyper;
    std::size_t k_features;
    Rng rng;
    std::vector<std::size_t> indices;  // permuted in place while partitioning
    std::vector<ForestModel::Node> nodes;
    std::vector<std::size_t> feature_pool;
    std::vector<std::size_t> cnt, pos;  // histogram scratch

    TreeBuilder(const BinnedData& d, const std::vector<int>& y, const ForestHyper& h,
                std::size_t k, std::uint64_t seed)
        : data(d), labels(y), hyper(h), k_features(k), rng(seed) {
        feature_pool.resize(d.n_features);
        for (std::size_t f = 0; f < d.n_features; ++f) feature_pool[f] = f;
        std::size_t max_bins = 1;
        for (const auto& th : d.thresholds) max_bins = std::max(max_bins, th.size() + 1);
        cnt.resize(max_bins);
        pos.resize(max_bins);
    }

    int build(std::size_t begin, std::size_t end, int depth) {
        std::size_t n = end - begin;
        std::size_t c1 = 0;
        for (std::size_t i = begin; i < end; ++i) c1 += static_cast<std::size_t>(labels[indices[i]]);
        std::size_t c0 = n - c1;

        int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        auto make_leaf = [&] {
            nodes[node_id].feature = -1;
            nodes[node_id].vote = c1 > c0 ? 1 : 0;
            return node_id;
        };

        bool depth_limit = hyper.max_depth >= 0 && depth >= hyper.max_depth;
        if (depth_limit || c0 == 0 || c1 == 0 ||
            n < 2 * static_cast<std::size_t>(hyper.min_leaf))
            return make_leaf();

        double parent_gini =
            1.0 - (static_cast<double>(c0) / n) * (static_cast<double>(c0) / n) -
            (static_cast<double>(c1) / n) * (static_cast<double>(c1) / n);

        // Sample k candidate features without replacement.
        for (std::size_t i = 0; i < k_features; ++i) {
            std::size_t j = i + rng.below(feature_pool.size() - i);
            std::swap(feature_pool[i], feature_pool[j]);
        }

        double best_score = std::numeric_limits<double>::infinity();
        std::size_t best_feature = 0;
        int best_bin = -1;
        for (std::size_t fi = 0; fi < k_features; ++fi) {
            std::size_t f = feature_pool[fi];
            std::size_t n_bins = data.thresholds[f].size() + 1;
            if (n_bins <= 1) continue;
            std::fill(cnt.begin(), cnt.begin() + n_bins, 0);
            std::fill(pos.begin(), pos.begin() + n_bins, 0);
            for (std::size_t i = begin; i < end; ++i) {
                std::uint16_t b = data.bin(indices[i], f);
                ++cnt[b];
                pos[b] += static_cast<std::size_t>(labels[indices[i]]);
            }
            std::size_t ln = 0, lp = 0;
            for (std::size_t b = 0; b + 1 < n_bins; ++b) {
                ln += cnt[b];
                lp += pos[b];
                if (ln < static_cast<std::size_t>(hyper.min_leaf)) continue;
                std::size_t rn = n - ln;
                if (rn < static_cast<std::size_t>(hyper.min_leaf)) break;
                double lpn = static_cast<double>(lp) / ln;
                double rpn = static_cast<double>(c1 - lp) / rn;
                double gini_l = 2.0 * lpn * (1.0 - lpn);
                double gini_r = 2.0 * rpn * (1.0 - rpn);
                double score = (ln * gini_l + rn * gini_r) / static_cast<double>(n);
                if (score < best_score) {
                    best_score = score;
                    best_feature = f;
                    best_bin = static_cast<int>(b);
                }
            }
        }
        if (best_bin < 0 || best_score >= parent_gini - 1e-12) return make_leaf();

        auto mid = std::stable_partition(
            indices.begin() + begin, indices.begin() + end,
            [&](std::size_t r) { return data.bin(r, best_feature) <= best_bin; });
        std::size_t split = static_cast<std::size_t>(mid - indices.begin());
        if (split == begin || split == end) return make_leaf();

        nodes[node_id].feature = static_cast<int>(best_feature);
        nodes[node_id].threshold = data.thresholds[best_feature][best_bin];
        int left = build(begin, split, depth + 1);
        int right = build(split, end, depth + 1);
        nodes[node_id].left = left;
        nodes[node_id].right = right;
        return node_id;
    }
};

}  // namespace

ModelPtr train_forest(const Dataset& train, const ForestHyper& hyper, std::uint64_t seed) {
    if (train.n_rows() == 0) throw ArgumentError("train_forest: empty training set");
    if (hyper.n_trees < 1) throw ArgumentError("train_forest: n_trees must be positive");

    auto model = std::make_shared<ForestModel>();
    for (const auto& f : train.schema.features) model->feature_names_.push_back(f.name);

    const std::size_t d = train.n_features();
    std::size_t k = d;
    if (hyper.features_per_split < 0)
        k = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
    else if (hyper.features_per_split > 0)
        k = std::min<std::size_t>(d, static_cast<std::size_t>(hyper.features_per_split));

    BinnedData binned = bin_dataset(train, std::max(2, hyper.max_bins));
    const std::size_t n = train.n_rows();

    model->trees_.resize(hyper.n_trees);
    parallel_for(static_cast<std::size_t>(hyper.n_trees), [&](std::size_t t) {
        TreeBuilder builder(binned, train.labels, hyper, k, derive_seed(seed, "tree", t));
        builder.indices.resize(n);
        if (hyper.bootstrap) {
            Rng boot(derive_seed(seed, "bootstrap", t));
            for (std::size_t i = 0; i < n; ++i) builder.indices[i] = boot.below(n);
        } else {
            for (std::size_t i = 0; i < n; ++i) builder.indices[i] = i;
        }
        builder.build(0, n, 0);
        model->trees_[t] = std::move(builder.nodes);
    });
    return model;
}

double ForestModel::predict_proba(std::span<const double> row) const {
    std::size_t votes = 0;
    for (const auto& tree : trees_) {
        int cur = 0;
        while (tree[cur].feature >= 0)
            cur = row[tree[cur].feature] < tree[cur].threshold ? tree[cur].left : tree[cur].right;
        votes += static_cast<std::size_t>(tree[cur].vote);
    }
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

nlohmann::ordered_json ForestModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "forest";
    j["decision_threshold"] = threshold_;
    j["features"] = feature_names_;
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) {
        nlohmann::ordered_json tj = nlohmann::ordered_json::array();
        for (const auto& n : tree)
            tj.push_back({n.feature, n.threshold, n.left, n.right, n.vote});
        trees.push_back(std::move(tj));
    }
    j["trees"] = std::move(trees);
    return j;
}

std::shared_ptr<ForestModel> ForestModel::from_json(const nlohmann::json& j) {
    auto m = std::make_shared<ForestModel>();
    m->threshold_ = j.at("decision_threshold").get<double>();
    m->feature_names_ = j.at("features").get<std::vector<std::string>>();
    for (const auto& tj : j.at("trees")) {
        std::vector<Node> tree;
        tree.reserve(tj.size());
        for (const auto& nj : tj) {
            Node n;
            n.feature = nj.at(0).get<int>();
            n.threshold = nj.at(1).get<double>();
            n.left = nj.at(2).get<int>();
            n.right = nj.at(3).get<int>();
            n.vote = nj.at(4).get<int>();
            tree.push_back(n);
        }
        m->trees_.push_back(std::move(tree));
    }
    return m;
}

}  // namespace limeout
