#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "limeout/report.hpp"

namespace fs = std::filesystem;
using limeout::AuditConfig;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw limeout::Error("cannot write " + path.string());
    out << content;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw limeout::Error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> k;
    std::optional<std::string> sensitive;  // comma separated
};

AuditConfig load_with_overrides(const std::string& config_path, const Overrides& ov) {
    AuditConfig cfg = limeout::load_audit_config(config_path);
    if (ov.seed) cfg.limeout.seed = *ov.seed;
    if (ov.out_dir) cfg.output_dir = *ov.out_dir;
    if (ov.k) {
        if (*ov.k < 1) throw limeout::ConfigError("k: must be >= 1");
        cfg.limeout.k = *ov.k;
    }
    if (ov.sensitive) {
        std::vector<std::string> names;
        std::string cur;
        for (char c : *ov.sensitive + ",") {
            if (c == ',') {
                if (!cur.empty()) names.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (names.empty())
            throw limeout::ConfigError("sensitive: override must name at least one feature");
        cfg.limeout.sensitive = names;
    }
    return cfg;
}

int cmd_audit(const std::string& config_path, const Overrides& ov) {
    AuditConfig cfg = load_with_overrides(config_path, ov);
    fs::create_directories(cfg.output_dir);

    limeout::AuditArtifacts artifacts = limeout::run_audit(cfg);
    fs::path out(cfg.output_dir);
    write_file(out / "report.json", artifacts.report_json);
    write_file(out / "report.txt", artifacts.report_text);

    std::cout << artifacts.report_text;
    std::cout << "\nreport written to " << (out / "report.json").string() << " and "
              << (out / "report.txt").string() << "\n";
    return 0;  // an unfair verdict is still a successful audit
}

int cmd_explain(const std::string& config_path, long long index, const Overrides& ov) {
    AuditConfig cfg = load_with_overrides(config_path, ov);
    fs::create_directories(cfg.output_dir);

    std::optional<limeout::SchemaHint> hint;
    if (!cfg.schema_hint_path.empty()) hint = limeout::SchemaHint::load(cfg.schema_hint_path);
    limeout::Dataset data = limeout::load_csv(cfg.dataset_path, hint);
    auto [train, test] = limeout::train_test_split(
        data, cfg.limeout.test_fraction, limeout::derive_seed(cfg.limeout.seed, "split"));
    if (index < 0 || static_cast<std::size_t>(index) >= test.n_rows())
        throw limeout::ArgumentError("instance index " + std::to_string(index) +
                                     " outside the test set (size " +
                                     std::to_string(test.n_rows()) + ")");

    limeout::PreparedTraining prep =
        limeout::prepare_training(train, cfg.limeout, cfg.limeout.seed);
    limeout::TrainingRecipe fit_only = cfg.recipe;
    fit_only.tune = false;
    limeout::ModelPtr model =
        fit_only.train(prep.balanced, limeout::derive_seed(cfg.limeout.seed, "baseline"));
    if (cfg.recipe.tune)
        limeout::tune_threshold(model, prep.has_validation ? prep.validation : prep.balanced);
    limeout::Discretizer disc(limeout::compute_stats(prep.balanced, 4), 4);

    limeout::LimeConfig lc = cfg.limeout.global.lime;
    lc.seed = limeout::derive_seed(cfg.limeout.seed, "explain", static_cast<std::uint64_t>(index));
    limeout::LocalExplanation ex =
        limeout::explain_instance(*model, test.row(static_cast<std::size_t>(index)), disc, lc);

    auto idx = static_cast<std::size_t>(index);
    fs::path out(cfg.output_dir);
    fs::path json_path = out / ("explanation_" + std::to_string(idx) + ".json");
    write_file(json_path, limeout::explanation_to_json(ex, idx).dump(2) + "\n");
    write_file(out / ("explanation_" + std::to_string(idx) + ".txt"),
               limeout::explanation_to_text(ex, idx));
    std::cout << limeout::explanation_to_text(ex, idx);
    std::cout << "\nexplanation written to " << json_path.string() << "\n";
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
    limeout::CompareResult result = limeout::compare_reports(read_json(path_a), read_json(path_b));
    std::cout << result.text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LimeOut: process-fairness auditing and repair for tabular binary classifiers"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    long long instance_index = 0;
    std::string report_a, report_b;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "audit configuration JSON")->required();
        cmd->add_option("--seed", ov.seed, "override the master seed");
        cmd->add_option("--out", ov.out_dir, "override the output directory");
        cmd->add_option("--k", ov.k, "override the top-k fairness cutoff");
        cmd->add_option("--sensitive", ov.sensitive, "override sensitive features (comma list)");
    };

    CLI::App* audit = app.add_subcommand("audit", "run the full audit and write reports");
    add_common(audit);

    CLI::App* explain = app.add_subcommand("explain", "explain one test instance");
    add_common(explain);
    explain->add_option("--index", instance_index, "test-set row index")->required();

    CLI::App* compare = app.add_subcommand("compare", "diff two machine-readable reports");
    compare->add_option("report_a", report_a, "first report.json")->required();
    compare->add_option("report_b", report_b, "second report.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (audit->parsed()) return cmd_audit(config_path, ov);
        if (explain->parsed()) return cmd_explain(config_path, instance_index, ov);
        if (compare->parsed()) return cmd_compare(report_a, report_b);
    } catch (const limeout::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
