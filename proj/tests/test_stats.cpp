#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "limeout/random.hpp"
#include "limeout/stats.hpp"
#include "test_helpers.hpp"

using namespace limeout;

namespace {

// Independent quantile oracle: sort and interpolate at q*(n-1) directly.
double quantile_oracle(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - (pos - lo)) + values[lo + 1] * (pos - lo);
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("quartiles of 1..8 match the interpolation oracle") {
    std::vector<double> values{1, 2, 3, 4, 5, 6, 7, 8};
    Dataset d = test_helpers::numeric_dataset(1, values, {0, 1, 0, 1, 0, 1, 0, 1});
    FeatureStats s = compute_stats(d, 4);
    REQUIRE(s.numerical[0].boundaries.size() == 3);
    CHECK(s.numerical[0].boundaries[0] == doctest::Approx(2.75).epsilon(1e-12));
    CHECK(s.numerical[0].boundaries[1] == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(s.numerical[0].boundaries[2] == doctest::Approx(6.25).epsilon(1e-12));
    for (int j = 1; j < 4; ++j)
        CHECK(s.numerical[0].boundaries[j - 1] ==
              doctest::Approx(quantile_oracle(values, j / 4.0)).epsilon(1e-12));
}

TEST_CASE("random columns match the quantile oracle for several p") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 5 + rng.below(200);
        std::vector<double> values(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = rng.normal(0, 10);
            labels[i] = static_cast<int>(rng.below(2));
        }
        int p = 2 + static_cast<int>(rng.below(7));
        Dataset d = test_helpers::numeric_dataset(1, values, labels);
        FeatureStats s = compute_stats(d, p);
        for (int j = 1; j < p; ++j)
            CHECK(s.numerical[0].boundaries[j - 1] ==
                  doctest::Approx(quantile_oracle(values, static_cast<double>(j) / p))
                      .epsilon(1e-12));
    }
}

TEST_CASE("categorical frequencies sum to one") {
    Dataset d = load_csv_text("c,label\nx,0\nx,0\ny,1\ny,1\n", std::nullopt, "inline");
    FeatureStats s = compute_stats(d, 4);
    REQUIRE(s.categorical[0].frequencies.size() == 2);
    CHECK(s.categorical[0].frequencies[0] == doctest::Approx(0.5));
    CHECK(s.categorical[0].frequencies[1] == doctest::Approx(0.5));
}

TEST_CASE("constant column sets the degenerate flag with collapsed boundaries") {
    Dataset d = test_helpers::numeric_dataset(1, {7, 7, 7, 7}, {0, 1, 0, 1});
    FeatureStats s = compute_stats(d, 4);
    CHECK(s.numerical[0].degenerate);
    CHECK(s.is_degenerate(0));
    for (double b : s.numerical[0].boundaries) CHECK(b == 7.0);
}

TEST_CASE("boundaries are non-decreasing and invariant to row order") {
    Rng rng(17);
    std::vector<double> values(300);
    std::vector<int> labels(300);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = rng.uniform(-5, 5);
        labels[i] = static_cast<int>(rng.below(2));
    }
    Dataset d = test_helpers::numeric_dataset(1, values, labels);
    FeatureStats s1 = compute_stats(d, 4);

    // shuffle rows
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<double> shuffled;
    std::vector<int> shuffled_labels;
    for (std::size_t i : order) {
        shuffled.push_back(values[i]);
        shuffled_labels.push_back(labels[i]);
    }
    Dataset d2 = test_helpers::numeric_dataset(1, shuffled, shuffled_labels);
    FeatureStats s2 = compute_stats(d2, 4);

    CHECK(std::is_sorted(s1.numerical[0].boundaries.begin(), s1.numerical[0].boundaries.end()));
    CHECK(s1.numerical[0].boundaries == s2.numerical[0].boundaries);
    CHECK(s1.numerical[0].mean == doctest::Approx(s2.numerical[0].mean).epsilon(1e-12));
}

TEST_CASE("compute_stats rejects bad arguments") {
    Dataset d = test_helpers::numeric_dataset(1, {1}, {0});
    CHECK_THROWS_AS(compute_stats(d, 1), ArgumentError);
    Dataset empty = test_helpers::numeric_dataset(1, {}, {});
    CHECK_THROWS_AS(compute_stats(empty, 4), ArgumentError);
}

TEST_CASE("perfectly correlated numerical feature is found") {
    Rng rng(23);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        double x = rng.uniform(0, 1);
        values.push_back(x);
        values.push_back(2.0 * x);  // y = 2x
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    Dataset d = test_helpers::numeric_dataset(2, values, labels);
    auto hits = correlated_features(d, {"f0"}, 0.8);
    CHECK(hits == std::vector<std::string>{"f1"});
    // threshold exactly 1.0 still returns the perfectly associated feature
    CHECK(correlated_features(d, {"f0"}, 1.0) == std::vector<std::string>{"f1"});
}

TEST_CASE("independent columns stay below the threshold") {
    Rng rng(29);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 1500; ++i) {
        values.push_back(rng.uniform(0, 1));
        values.push_back(rng.uniform(0, 1));
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    Dataset d = test_helpers::numeric_dataset(2, values, labels);
    CHECK(correlated_features(d, {"f0"}, 0.8).empty());
}

TEST_CASE("empty target set yields an empty result") {
    Dataset d = test_helpers::numeric_dataset(1, {1, 2}, {0, 1});
    CHECK(correlated_features(d, {}, 0.5).empty());
}

TEST_CASE("categorical copy of a feature has maximal association") {
    // c2 mirrors c1 exactly, c3 is independent
    std::string csv = "c1,c2,c3,label\n";
    Rng rng(31);
    for (int i = 0; i < 400; ++i) {
        std::string v = rng.below(2) ? "a" : "b";
        std::string w = rng.below(2) ? "p" : "q";
        csv += v + "," + v + "," + w + "," + (rng.below(2) ? "1" : "0") + "\n";
    }
    Dataset d = load_csv_text(csv, std::nullopt, "inline");
    auto hits = correlated_features(d, {"c1"}, 0.85);
    CHECK(hits == std::vector<std::string>{"c2"});
}

}  // TEST_SUITE
