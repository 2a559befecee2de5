#include <doctest.h>

#include <cmath>

#include "limeout/audit.hpp"
#include "limeout/report.hpp"
#include "test_helpers.hpp"

using namespace limeout;

namespace {

// Paired t-test reference values computed with scipy.stats.ttest_rel and
// frozen before the implementation was written.
struct TTestCase {
    std::vector<double> a, b;
    double t, p;
};

const std::vector<TTestCase> kTTestCases = {
    {{0.8000, 0.8200, 0.8100}, {0.8400, 0.8500, 0.8600}, -6.928203230276, 0.020204102887},
    {{0.6316, 0.8585, 0.6621, 0.7267, 0.7593, 0.8336, 0.7906},
     {0.6255, 0.8813, 0.6771, 0.7209, 0.7799, 0.8440, 0.8550},
     -1.927774211925, 0.102158990622},
    {{0.5508, 0.6238, 0.6306, 0.5296, 0.5344},
     {0.5451, 0.6293, 0.6471, 0.5332, 0.5349},
     -1.120929882650, 0.325065416956},
    {{0.9154, 0.7192, 0.5043, 0.5735, 0.7479, 0.9372},
     {0.8706, 0.7020, 0.4883, 0.6260, 0.7705, 0.8766},
     0.617015416278, 0.564234169413},
    {{0.5553, 0.6716, 0.7562, 0.5712, 0.7736, 0.5482, 0.6642, 0.6045},
     {0.5316, 0.6722, 0.7244, 0.5592, 0.7316, 0.5588, 0.6741, 0.5953},
     1.795456362426, 0.115650869729},
    {{0.7158, 0.7964, 0.6579, 0.5282},
     {0.7094, 0.7905, 0.6299, 0.5169},
     2.491000519289, 0.088405911141},
    {{0.8674, 0.7912, 0.5806, 0.5622, 0.5260, 0.5582, 0.6556, 0.8488, 0.7283},
     {0.8745, 0.7726, 0.5682, 0.5542, 0.5088, 0.5853, 0.6474, 0.8311, 0.7012},
     1.530577184181, 0.164405284858},
    {{0.6565, 0.5488, 0.7686, 0.5418, 0.5763, 0.8182, 0.7305, 0.6739},
     {0.6527, 0.5745, 0.7991, 0.5624, 0.5627, 0.8373, 0.7381, 0.6724},
     -1.894598200897, 0.099997119020},
    {{0.7069, 0.7176, 0.9292, 0.6199, 0.5594, 0.7597},
     {0.7040, 0.7363, 0.9432, 0.6217, 0.5714, 0.7363},
     -0.536605859925, 0.614546167037},
    {{0.7779, 0.7690, 0.5523, 0.8306, 0.6901, 0.9176, 0.7533, 0.7470, 0.5234, 0.7952, 0.8894},
     {0.7609, 0.7841, 0.5385, 0.8026, 0.7041, 0.9296, 0.7632, 0.7524, 0.5330, 0.8311, 0.8537},
     -0.103926721254, 0.919282295039},
};

// Biased synthetic data: the label tracks the "sex" and "color" columns, so
// both land in the global top ranks; "noise" columns stay irrelevant. The
// sensitive columns are skewed three-level categoricals; balanced two-level
// ones can cancel out of signed aggregates entirely.
Dataset biased_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::string csv = "income,sex,color,noise0,noise1,label\n";
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t u = rng.below(100), v = rng.below(100);
        int sex = u < 55 ? 0 : (u < 90 ? 1 : 2);
        int color = v < 60 ? 0 : (v < 85 ? 1 : 2);
        double income = rng.normal(0, 1);
        double signal = (sex == 0 ? 2.2 : sex == 1 ? 0.0 : -0.6) +
                        (color == 0 ? 1.8 : color == 1 ? 0.0 : -0.5) + 0.5 * income +
                        rng.normal(0, 0.3);
        int y = signal > 3.4 ? 1 : 0;
        csv += std::to_string(income) + ",s" + std::to_string(sex) + ",c" +
               std::to_string(color) + "," + std::to_string(rng.uniform()) + "," +
               std::to_string(rng.uniform()) + "," + std::to_string(y) + "\n";
    }
    return load_csv_text(csv, std::nullopt, "inline");
}

// Fair synthetic data: same columns, but the label ignores sex and color.
Dataset fair_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::string csv = "income,sex,color,noise0,noise1,label\n";
    for (std::size_t i = 0; i < n; ++i) {
        double income = rng.normal(0, 1);
        double noise0 = rng.uniform();
        double noise1 = rng.uniform();
        int y = income + 3.0 * noise0 + 3.0 * noise1 > 3.6 ? 1 : 0;
        csv += std::to_string(income) + ",s" + std::to_string(rng.below(2)) + ",c" +
               std::to_string(rng.below(2)) + "," + std::to_string(noise0) + "," +
               std::to_string(noise1) + "," + std::to_string(y) + "\n";
    }
    return load_csv_text(csv, std::nullopt, "inline");
}

LimeOutConfig small_config(std::vector<std::string> sensitive) {
    LimeOutConfig cfg;
    cfg.sensitive = std::move(sensitive);
    cfg.k = 3;
    cfg.global.candidate_cap = 30;
    cfg.global.pick_budget = 10;
    cfg.global.lime.n_samples = 400;
    cfg.runs = 4;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_SUITE("audit") {

TEST_CASE("t statistic and p value match the scipy oracle") {
    for (const auto& c : kTTestCases) {
        SignificanceResult r = significance_test(c.a, c.b);
        CHECK(std::abs(r.t_statistic - c.t) < 1e-6);
        CHECK(std::abs(r.p_value - c.p) < 1e-6);
        CHECK_FALSE(r.degenerate);
    }
}

TEST_CASE("identical vectors give t zero and p one") {
    std::vector<double> v{0.8, 0.81, 0.82};
    SignificanceResult r = significance_test(v, v);
    CHECK(r.t_statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("constant nonzero differences are flagged degenerate") {
    SignificanceResult r = significance_test({0.9, 0.9, 0.9, 0.9}, {0.8, 0.8, 0.8, 0.8});
    CHECK(r.degenerate);
    CHECK(r.p_value == 0.0);
}

TEST_CASE("significance_test validates its inputs") {
    CHECK_THROWS_AS(significance_test({0.1}, {0.2}), ArgumentError);
    CHECK_THROWS_AS(significance_test({0.1, 0.2}, {0.2}), ArgumentError);
}

TEST_CASE("one flagged feature still yields a pool of two") {
    Dataset d = biased_dataset(300, 1);
    TrainingRecipe recipe;
    auto pool = build_dropout_pool(recipe, d, {"sex"}, {}, 5);
    REQUIRE(pool.size() == 2);
    // both members drop exactly {sex}; logistic training is deterministic, so
    // the duplicate recipe trains to identical parameters
    auto p0 = pool[0]->predict_proba_all(d);
    auto p1 = pool[1]->predict_proba_all(d);
    CHECK(p0 == p1);

    ModelPtr ens = ensemble_average(pool);
    EvalReport member_eval = evaluate(*pool[0], d);
    ModelPtr member_at_half = pool[0];
    member_at_half->set_decision_threshold(0.5);
    EvalReport expect = evaluate(*member_at_half, d);
    EvalReport got = evaluate(*ens, d);
    CHECK(got.accuracy == expect.accuracy);
    CHECK(got.tp == expect.tp);
    (void)member_eval;
}

TEST_CASE("three flagged features yield four pool members") {
    Dataset d = biased_dataset(300, 2);
    TrainingRecipe recipe;
    auto pool = build_dropout_pool(recipe, d, {"sex", "color", "noise0"}, {}, 5);
    REQUIRE(pool.size() == 4);
    auto* last = dynamic_cast<const DropoutModel*>(pool.back().get());
    REQUIRE(last != nullptr);
    CHECK(last->dropped_features() == std::vector<std::string>{"sex", "color", "noise0"});
}

TEST_CASE("companions join their flagged feature's drop set") {
    Dataset d = biased_dataset(200, 3);
    TrainingRecipe recipe;
    std::map<std::string, std::vector<std::string>> companions{{"sex", {"color"}}};
    auto pool = build_dropout_pool(recipe, d, {"sex"}, companions, 5);
    auto* m0 = dynamic_cast<const DropoutModel*>(pool[0].get());
    REQUIRE(m0 != nullptr);
    CHECK(m0->dropped_features() == std::vector<std::string>{"sex", "color"});
}

TEST_CASE("a pool that would drop everything is a configuration error") {
    Dataset d = load_csv_text("a,b,label\n1,2,0\n3,4,1\n", std::nullopt, "inline");
    TrainingRecipe recipe;
    std::map<std::string, std::vector<std::string>> companions{{"a", {"b"}}};
    CHECK_THROWS_AS(build_dropout_pool(recipe, d, {"a"}, companions, 1), ConfigError);
}

TEST_CASE("an unbiased model is judged fair and left alone") {
    Dataset d = fair_dataset(500, 4);
    auto [train, test] = train_test_split(d, 0.3, 2);
    TrainingRecipe recipe;
    AuditReport report = run_limeout(recipe, train, test, small_config({"sex", "color"}));
    CHECK(report.verdict_before.verdict == Fairness::Fair);
    CHECK_FALSE(report.repaired);
    CHECK(report.pool.empty());
    CHECK_FALSE(report.significance.has_value());
    // fair-input idempotence: the after-state echoes the before-state
    CHECK(report.global_after.ranking == report.global_before.ranking);
    CHECK(report.global_after.aggregates == report.global_before.aggregates);
}

TEST_CASE("a biased model is repaired with an i-plus-one pool") {
    Dataset d = biased_dataset(600, 5);
    auto [train, test] = train_test_split(d, 0.3, 2);
    TrainingRecipe recipe;
    LimeOutConfig cfg = small_config({"sex", "color"});
    AuditReport report = run_limeout(recipe, train, test, cfg);
    REQUIRE(report.verdict_before.verdict == Fairness::Unfair);
    CHECK(report.repaired);
    CHECK(report.flagged == std::vector<std::string>{"sex", "color"});
    CHECK(report.pool.size() == report.flagged.size() + 1);
    REQUIRE(report.significance.has_value());
    CHECK(report.significance->runs == cfg.runs);
    CHECK(report.significance->acc_baseline.size() == static_cast<std::size_t>(cfg.runs));
    CHECK(report.ensemble_eval.tp + report.ensemble_eval.fp + report.ensemble_eval.tn +
              report.ensemble_eval.fn ==
          static_cast<long>(test.n_rows()));
}

TEST_CASE("single-sensitive verdicts take no action unless forced") {
    // only "sex" drives the label strongly enough to rank in the top 2
    Rng rng(6);
    std::string csv = "income,sex,color,noise0,noise1,label\n";
    for (int i = 0; i < 500; ++i) {
        std::uint64_t u = rng.below(100);
        int sex = u < 55 ? 0 : (u < 90 ? 1 : 2);
        double income = rng.normal(0, 1);
        double boost = sex == 0 ? 2.2 : (sex == 1 ? 0.0 : -0.5);
        int y = boost + 1.5 * income + rng.normal(0, 0.3) > 2.2 ? 1 : 0;
        csv += std::to_string(income) + ",s" + std::to_string(sex) + ",c" +
               std::to_string(rng.below(2)) + "," + std::to_string(rng.uniform()) + "," +
               std::to_string(rng.uniform()) + "," + std::to_string(y) + "\n";
    }
    Dataset d = load_csv_text(csv, std::nullopt, "inline");
    auto [train, test] = train_test_split(d, 0.3, 3);
    TrainingRecipe recipe;
    LimeOutConfig cfg = small_config({"sex", "color"});
    cfg.k = 2;
    AuditReport report = run_limeout(recipe, train, test, cfg);
    REQUIRE(report.verdict_before.verdict == Fairness::SingleSensitive);
    CHECK_FALSE(report.repaired);

    cfg.force_repair = true;
    AuditReport forced = run_limeout(recipe, train, test, cfg);
    CHECK(forced.repaired);
    CHECK(forced.pool.size() == 2);
}

TEST_CASE("rerunning with the echoed config reproduces the report bit-exactly") {
    Dataset d = biased_dataset(400, 7);
    auto [train, test] = train_test_split(d, 0.25, 9);
    TrainingRecipe recipe;
    LimeOutConfig cfg = small_config({"sex", "color"});
    cfg.runs = 2;
    AuditReport r1 = run_limeout(recipe, train, test, cfg);
    AuditReport r2 = run_limeout(recipe, train, test, cfg);
    AuditConfig shell;
    shell.dataset_path = "inline";
    shell.recipe = recipe;
    shell.limeout = cfg;
    CHECK(audit_report_to_json(r1, shell).dump() == audit_report_to_json(r2, shell).dump());
}

TEST_CASE("audits validate the sensitive set and k") {
    Dataset d = biased_dataset(100, 8);
    auto [train, test] = train_test_split(d, 0.3, 1);
    TrainingRecipe recipe;
    LimeOutConfig cfg = small_config({});
    CHECK_THROWS_AS(run_limeout(recipe, train, test, cfg), ConfigError);
    cfg = small_config({"Gender"});
    CHECK_THROWS_WITH_AS(run_limeout(recipe, train, test, cfg), doctest::Contains("Gender"),
                         ConfigError);
}

}  // TEST_SUITE
