#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "limeout/report.hpp"
#include "test_helpers.hpp"

using namespace limeout;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Small skewed synthetic dataset written to disk for CLI-level tests.
fs::path write_tiny_dataset(const fs::path& dir) {
    Rng rng(3);
    std::ostringstream csv;
    csv << "income,sex,color,noise,label\n";
    for (int i = 0; i < 240; ++i) {
        int sex = rng.below(10) < 7 ? 1 : 0;
        int color = rng.below(10) < 7 ? 1 : 0;
        double income = rng.normal(0, 1);
        int y = 2.0 * sex + 1.8 * color + 0.5 * income + rng.normal(0, 0.3) > 3.3 ? 1 : 0;
        csv << income << ",s" << sex << ",c" << color << "," << rng.uniform() << "," << y << "\n";
    }
    fs::path p = dir / "tiny.csv";
    std::ofstream out(p);
    out << csv.str();
    return p;
}

nlohmann::json base_config_json(const fs::path& dataset) {
    return nlohmann::json{{"dataset", dataset.string()},
                          {"sensitive", {"sex", "color"}},
                          {"k", 3},
                          {"n_samples", 300},
                          {"candidate_cap", 24},
                          {"pick_budget", 8},
                          {"runs", 2},
                          {"seed", 9},
                          {"recipe", {{"kind", "logistic"}}}};
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("unknown config keys are named in the diagnostic") {
    nlohmann::json j{{"dataset", "x.csv"}, {"sensitive", {"a"}}, {"bogus_knob", 1}};
    CHECK_THROWS_WITH_AS(audit_config_from_json(j), doctest::Contains("bogus_knob"), ConfigError);
}

TEST_CASE("missing and malformed keys are rejected") {
    CHECK_THROWS_WITH_AS(audit_config_from_json({{"sensitive", {"a"}}}),
                         doctest::Contains("dataset"), ConfigError);
    CHECK_THROWS_WITH_AS(audit_config_from_json({{"dataset", "x"}, {"sensitive", nlohmann::json::array()}}),
                         doctest::Contains("sensitive"), ConfigError);
    nlohmann::json bad_k{{"dataset", "x"}, {"sensitive", {"a"}}, {"k", 0}};
    CHECK_THROWS_WITH_AS(audit_config_from_json(bad_k), doctest::Contains("k"), ConfigError);
    nlohmann::json bad_recipe{{"dataset", "x"}, {"sensitive", {"a"}},
                              {"recipe", {{"kind", "svm"}}}};
    CHECK_THROWS_WITH_AS(audit_config_from_json(bad_recipe), doctest::Contains("recipe.kind"),
                         ConfigError);
    nlohmann::json bad_fraction{{"dataset", "x"}, {"sensitive", {"a"}}, {"test_fraction", 1.5}};
    CHECK_THROWS_WITH_AS(audit_config_from_json(bad_fraction), doctest::Contains("test_fraction"),
                         ConfigError);
}

TEST_CASE("unknown sensitive feature surfaces as a config error naming it") {
    fs::path dir = fs::temp_directory_path() / "limeout_report_test";
    fs::create_directories(dir);
    fs::path dataset = write_tiny_dataset(dir);
    nlohmann::json j = base_config_json(dataset);
    j["sensitive"] = {"Gender"};
    AuditConfig cfg = audit_config_from_json(j);
    CHECK_THROWS_WITH_AS(run_audit(cfg), doctest::Contains("Gender"), ConfigError);
}

TEST_CASE("config echo round-trips through its own parser") {
    nlohmann::json j = base_config_json("data.csv");
    AuditConfig cfg = audit_config_from_json(j);
    nlohmann::ordered_json echo = audit_config_to_json(cfg);
    AuditConfig back = audit_config_from_json(nlohmann::json::parse(echo.dump()));
    CHECK(audit_config_to_json(back).dump() == echo.dump());
}

TEST_CASE("an audit report compares as identical to itself") {
    fs::path dir = fs::temp_directory_path() / "limeout_report_test";
    fs::create_directories(dir);
    AuditConfig cfg = audit_config_from_json(base_config_json(write_tiny_dataset(dir)));
    AuditArtifacts artifacts = run_audit(cfg);
    nlohmann::json report = nlohmann::json::parse(artifacts.report_json);
    CompareResult diff = compare_reports(report, report);
    CHECK(diff.identical());
    CHECK(diff.accuracy_delta == 0.0);
    CHECK(diff.rank_changes.empty());
}

TEST_CASE("reports from different schemas refuse to compare") {
    nlohmann::json a{{"dataset", {{"features", {"a", "b"}}}},
                     {"config", {{"sensitive", {"a"}}}}};
    nlohmann::json b{{"dataset", {{"features", {"a", "c"}}}},
                     {"config", {{"sensitive", {"a"}}}}};
    CHECK_THROWS_AS(compare_reports(a, b), ComparisonError);
}

TEST_CASE("explanation exports are deterministic") {
    Dataset d = load_csv_text("x,label\n1,0\n2,1\n3,0\n4,1\n5,0\n6,1\n7,0\n8,1\n",
                              std::nullopt, "inline");
    Discretizer disc(compute_stats(d, 4), 4);
    ModelPtr m = train_logistic(d, LogisticHyper{}, 0);
    LimeConfig lc;
    lc.n_samples = 200;
    lc.seed = 7;
    LocalExplanation e1 = explain_instance(*m, d.row(0), disc, lc);
    LocalExplanation e2 = explain_instance(*m, d.row(0), disc, lc);
    CHECK(explanation_to_json(e1, 0).dump() == explanation_to_json(e2, 0).dump());
    CHECK(explanation_to_text(e1, 0) == explanation_to_text(e2, 0));
}

TEST_CASE("cli audit runs twice to byte-identical machine reports") {
    fs::path dir = fs::temp_directory_path() / "limeout_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path dataset = write_tiny_dataset(dir);

    nlohmann::json j = base_config_json(dataset);
    fs::path config_path = dir / "config.json";
    {
        std::ofstream out(config_path);
        out << j.dump(2);
    }
    std::string cli = test_helpers::cli_path();
    auto run = [&](const std::string& out_dir) {
        std::string cmd = cli + " audit --config " + config_path.string() + " --out " + out_dir +
                          " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(run((dir / "out1").string()) == 0);
    REQUIRE(run((dir / "out2").string()) == 0);
    CHECK(slurp(dir / "out1" / "report.json") == slurp(dir / "out2" / "report.json"));
    CHECK(slurp(dir / "out1" / "report.txt") == slurp(dir / "out2" / "report.txt"));

    // compare subcommand sees no difference between the two runs
    std::string cmd = cli + " compare " + (dir / "out1" / "report.json").string() + " " +
                      (dir / "out2" / "report.json").string() + " > " +
                      (dir / "compare.txt").string() + " 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(dir / "compare.txt").find("identical") != std::string::npos);
}

TEST_CASE("cli explain is deterministic and respects bounds") {
    fs::path dir = fs::temp_directory_path() / "limeout_cli_explain";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path dataset = write_tiny_dataset(dir);
    nlohmann::json j = base_config_json(dataset);
    fs::path config_path = dir / "config.json";
    {
        std::ofstream out(config_path);
        out << j.dump(2);
    }
    std::string cli = test_helpers::cli_path();
    auto run = [&](long long index, const std::string& out_dir) {
        std::string cmd = cli + " explain --config " + config_path.string() + " --index " +
                          std::to_string(index) + " --out " + out_dir + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(run(0, (dir / "e1").string()) == 0);
    REQUIRE(run(0, (dir / "e2").string()) == 0);
    CHECK(slurp(dir / "e1" / "explanation_0.json") == slurp(dir / "e2" / "explanation_0.json"));
    CHECK(run(100000, (dir / "e3").string()) != 0);  // out of range
}

TEST_CASE("cli fails with a diagnostic on a missing config") {
    std::string cli = test_helpers::cli_path();
    CHECK(std::system((cli + " audit --config /nonexistent.json > /dev/null 2>&1").c_str()) != 0);
}

}  // TEST_SUITE
