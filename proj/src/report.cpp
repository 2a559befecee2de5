#include "limeout/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace limeout {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& scope) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw ConfigError(scope.empty() ? "unknown config key '" + key + "'"
                                            : scope + ": unknown key '" + key + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key + ": has the wrong type");
    }
}

}  // namespace

AuditConfig audit_config_from_json(const json& j) {
    reject_unknown_keys(j, {"dataset", "schema_hint", "recipe", "sensitive", "k", "sigma",
                            "n_samples", "ridge_lambda", "pick_budget", "candidate_cap",
                            "correlation_threshold", "seed", "runs", "test_fraction",
                            "validation_fraction", "smote", "force_repair", "aggregation",
                            "pick", "output_dir"},
                        "");
    AuditConfig cfg;
    if (!j.contains("dataset")) throw ConfigError("dataset: missing required key");
    cfg.dataset_path = j.at("dataset").get<std::string>();
    cfg.schema_hint_path = get_or<std::string>(j, "schema_hint", "");
    cfg.output_dir = get_or<std::string>(j, "output_dir", ".");

    if (j.contains("recipe")) {
        const json& r = j.at("recipe");
        reject_unknown_keys(r, {"kind", "tune_threshold", "logistic", "forest"}, "recipe");
        cfg.recipe.kind = get_or<std::string>(r, "kind", "logistic");
        if (cfg.recipe.kind != "logistic" && cfg.recipe.kind != "forest")
            throw ConfigError("recipe.kind: must be 'logistic' or 'forest'");
        cfg.recipe.tune = get_or<bool>(r, "tune_threshold", true);
        if (r.contains("logistic")) {
            const json& h = r.at("logistic");
            reject_unknown_keys(h, {"learning_rate", "epochs", "l2"}, "recipe.logistic");
            cfg.recipe.logistic.learning_rate =
                get_or<double>(h, "learning_rate", cfg.recipe.logistic.learning_rate);
            cfg.recipe.logistic.epochs = get_or<int>(h, "epochs", cfg.recipe.logistic.epochs);
            cfg.recipe.logistic.l2 = get_or<double>(h, "l2", cfg.recipe.logistic.l2);
            if (cfg.recipe.logistic.epochs < 0) throw ConfigError("recipe.logistic.epochs: negative");
            if (cfg.recipe.logistic.learning_rate <= 0)
                throw ConfigError("recipe.logistic.learning_rate: must be positive");
        }
        if (r.contains("forest")) {
            const json& h = r.at("forest");
            reject_unknown_keys(h, {"n_trees", "max_depth", "min_leaf", "features_per_split",
                                    "bootstrap", "max_bins"},
                                "recipe.forest");
            cfg.recipe.forest.n_trees = get_or<int>(h, "n_trees", cfg.recipe.forest.n_trees);
            cfg.recipe.forest.max_depth = get_or<int>(h, "max_depth", cfg.recipe.forest.max_depth);
            cfg.recipe.forest.min_leaf = get_or<int>(h, "min_leaf", cfg.recipe.forest.min_leaf);
            cfg.recipe.forest.features_per_split =
                get_or<int>(h, "features_per_split", cfg.recipe.forest.features_per_split);
            cfg.recipe.forest.bootstrap = get_or<bool>(h, "bootstrap", cfg.recipe.forest.bootstrap);
            cfg.recipe.forest.max_bins = get_or<int>(h, "max_bins", cfg.recipe.forest.max_bins);
            if (cfg.recipe.forest.n_trees < 1) throw ConfigError("recipe.forest.n_trees: must be >= 1");
            if (cfg.recipe.forest.min_leaf < 1) throw ConfigError("recipe.forest.min_leaf: must be >= 1");
        }
    }

    if (!j.contains("sensitive") || !j.at("sensitive").is_array() || j.at("sensitive").empty())
        throw ConfigError("sensitive: must be a non-empty list of feature names");
    cfg.limeout.sensitive = j.at("sensitive").get<std::vector<std::string>>();

    cfg.limeout.k = get_or<int>(j, "k", 10);
    if (cfg.limeout.k < 1) throw ConfigError("k: must be >= 1");
    cfg.limeout.global.lime.sigma = get_or<double>(j, "sigma", 0.0);
    if (cfg.limeout.global.lime.sigma < 0) throw ConfigError("sigma: must be >= 0");
    cfg.limeout.global.lime.n_samples = get_or<int>(j, "n_samples", 5000);
    if (cfg.limeout.global.lime.n_samples < 2) throw ConfigError("n_samples: must be >= 2");
    cfg.limeout.global.lime.ridge_lambda = get_or<double>(j, "ridge_lambda", 1.0);
    if (cfg.limeout.global.lime.ridge_lambda < 0) throw ConfigError("ridge_lambda: must be >= 0");
    cfg.limeout.global.pick_budget =
        static_cast<std::size_t>(get_or<long long>(j, "pick_budget", 50));
    if (cfg.limeout.global.pick_budget < 1) throw ConfigError("pick_budget: must be >= 1");
    cfg.limeout.global.candidate_cap =
        static_cast<std::size_t>(get_or<long long>(j, "candidate_cap", 1000));
    if (cfg.limeout.global.candidate_cap < 1) throw ConfigError("candidate_cap: must be >= 1");
    cfg.limeout.correlation_threshold = get_or<double>(j, "correlation_threshold", 0.85);
    if (cfg.limeout.correlation_threshold < 0 || cfg.limeout.correlation_threshold > 1)
        throw ConfigError("correlation_threshold: must be in [0,1]");
    cfg.limeout.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.limeout.runs = get_or<int>(j, "runs", 10);
    if (cfg.limeout.runs < 0) throw ConfigError("runs: must be >= 0");
    cfg.limeout.test_fraction = get_or<double>(j, "test_fraction", 0.2);
    if (!(cfg.limeout.test_fraction > 0 && cfg.limeout.test_fraction < 1))
        throw ConfigError("test_fraction: must be in (0,1)");
    cfg.limeout.validation_fraction = get_or<double>(j, "validation_fraction", 0.1);
    if (cfg.limeout.validation_fraction < 0 || cfg.limeout.validation_fraction >= 1)
        throw ConfigError("validation_fraction: must be in [0,1)");
    if (j.contains("smote")) {
        const json& s = j.at("smote");
        reject_unknown_keys(s, {"enabled", "k_neighbors"}, "smote");
        cfg.limeout.smote.enabled = get_or<bool>(s, "enabled", true);
        cfg.limeout.smote.k_neighbors = get_or<int>(s, "k_neighbors", 5);
        if (cfg.limeout.smote.k_neighbors < 1) throw ConfigError("smote.k_neighbors: must be >= 1");
    }
    cfg.limeout.force_repair = get_or<bool>(j, "force_repair", false);

    std::string agg = get_or<std::string>(j, "aggregation", "signed");
    if (agg != "signed" && agg != "absolute")
        throw ConfigError("aggregation: must be 'signed' or 'absolute'");
    cfg.limeout.global.absolute_aggregation = agg == "absolute";
    std::string pick = get_or<std::string>(j, "pick", "submodular");
    if (pick != "submodular" && pick != "random")
        throw ConfigError("pick: must be 'submodular' or 'random'");
    cfg.limeout.global.random_pick = pick == "random";
    return cfg;
}

AuditConfig load_audit_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return audit_config_from_json(j);
}

ordered_json audit_config_to_json(const AuditConfig& cfg) {
    ordered_json j;
    j["dataset"] = cfg.dataset_path;
    j["schema_hint"] = cfg.schema_hint_path;
    ordered_json recipe;
    recipe["kind"] = cfg.recipe.kind;
    recipe["tune_threshold"] = cfg.recipe.tune;
    recipe["logistic"] = {{"learning_rate", cfg.recipe.logistic.learning_rate},
                          {"epochs", cfg.recipe.logistic.epochs},
                          {"l2", cfg.recipe.logistic.l2}};
    recipe["forest"] = {{"n_trees", cfg.recipe.forest.n_trees},
                        {"max_depth", cfg.recipe.forest.max_depth},
                        {"min_leaf", cfg.recipe.forest.min_leaf},
                        {"features_per_split", cfg.recipe.forest.features_per_split},
                        {"bootstrap", cfg.recipe.forest.bootstrap},
                        {"max_bins", cfg.recipe.forest.max_bins}};
    j["recipe"] = std::move(recipe);
    j["sensitive"] = cfg.limeout.sensitive;
    j["k"] = cfg.limeout.k;
    j["sigma"] = cfg.limeout.global.lime.sigma;
    j["n_samples"] = cfg.limeout.global.lime.n_samples;
    j["ridge_lambda"] = cfg.limeout.global.lime.ridge_lambda;
    j["pick_budget"] = cfg.limeout.global.pick_budget;
    j["candidate_cap"] = cfg.limeout.global.candidate_cap;
    j["correlation_threshold"] = cfg.limeout.correlation_threshold;
    j["seed"] = cfg.limeout.seed;
    j["runs"] = cfg.limeout.runs;
    j["test_fraction"] = cfg.limeout.test_fraction;
    j["validation_fraction"] = cfg.limeout.validation_fraction;
    j["smote"] = {{"enabled", cfg.limeout.smote.enabled},
                  {"k_neighbors", cfg.limeout.smote.k_neighbors}};
    j["force_repair"] = cfg.limeout.force_repair;
    j["aggregation"] = cfg.limeout.global.absolute_aggregation ? "absolute" : "signed";
    j["pick"] = cfg.limeout.global.random_pick ? "random" : "submodular";
    // output_dir is deliberately not echoed: it has no effect on the audit,
    // and reports written to different directories should stay byte-identical
    return j;
}

namespace {

ordered_json verdict_to_json(const FairnessVerdict& v) {
    ordered_json j;
    j["verdict"] = to_string(v.verdict);
    j["k"] = v.k;
    j["sensitive_in_top_k"] = v.sensitive_in_top_k;
    return j;
}

ordered_json global_to_json(const GlobalExplanation& g) {
    ordered_json j;
    ordered_json contributions = ordered_json::array();
    for (const auto& name : g.ranking)
        contributions.push_back({{"feature", name}, {"contribution", g.aggregate_of(name)}});
    j["contributions"] = std::move(contributions);
    j["picked_instances"] = g.picked_instances;
    return j;
}

ordered_json eval_to_json(const EvalReport& e) {
    ordered_json j;
    j["accuracy"] = e.accuracy;
    j["f1"] = e.f1;
    j["tp"] = e.tp;
    j["fp"] = e.fp;
    j["tn"] = e.tn;
    j["fn"] = e.fn;
    return j;
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

std::string pct(double v) { return fmt(100.0 * v, 2) + "%"; }

}  // namespace

ordered_json audit_report_to_json(const AuditReport& report, const AuditConfig& cfg) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = audit_config_to_json(cfg);
    j["dataset"] = {{"path", cfg.dataset_path},
                    {"features", report.feature_names},
                    {"target", report.target_name},
                    {"n_train", report.n_train},
                    {"n_test", report.n_test}};
    j["baseline"] = {{"kind", report.recipe.kind},
                     {"decision_threshold", report.baseline_threshold},
                     {"eval", eval_to_json(report.baseline_eval)}};
    j["verdict_before"] = verdict_to_json(report.verdict_before);
    j["global_before"] = global_to_json(report.global_before);
    j["repaired"] = report.repaired;
    if (report.repaired) {
        j["flagged"] = report.flagged;
        ordered_json companions;
        for (const auto& [feature, friends] : report.companions) companions[feature] = friends;
        j["correlated_companions"] = std::move(companions);
        ordered_json pool = ordered_json::array();
        for (const auto& entry : report.pool)
            pool.push_back({{"dropped", entry.dropped}, {"eval", eval_to_json(entry.eval)}});
        j["pool"] = std::move(pool);
        j["ensemble_eval"] = eval_to_json(report.ensemble_eval);
        j["verdict_after"] = verdict_to_json(report.verdict_after);
        j["global_after"] = global_to_json(report.global_after);
    }
    if (report.significance) {
        const auto& s = *report.significance;
        j["significance"] = {{"t_statistic", s.t_statistic}, {"p_value", s.p_value},
                             {"runs", s.runs},               {"degenerate", s.degenerate},
                             {"acc_baseline", s.acc_baseline}, {"acc_ensemble", s.acc_ensemble}};
    }
    return j;
}

std::string audit_report_to_text(const AuditReport& report) {
    std::ostringstream os;
    os << "LimeOut audit report\n";
    os << "====================\n";
    os << "model: " << report.recipe.kind << "   train rows: " << report.n_train
       << "   test rows: " << report.n_test << "   seed: " << report.config.seed << "\n";
    os << "sensitive features:";
    for (const auto& s : report.config.sensitive) os << " " << s;
    os << "   (top-k = " << report.config.k << ")\n\n";

    os << "baseline accuracy: " << pct(report.baseline_eval.accuracy)
       << "   f1: " << fmt(report.baseline_eval.f1, 4)
       << "   threshold: " << fmt(report.baseline_threshold, 4) << "\n";
    os << "verdict: " << to_string(report.verdict_before.verdict);
    if (!report.verdict_before.sensitive_in_top_k.empty()) {
        os << "  (in top " << report.config.k << ":";
        for (const auto& s : report.verdict_before.sensitive_in_top_k) os << " " << s;
        os << ")";
    }
    os << "\n\n";

    auto is_sensitive = [&](const std::string& name) {
        return std::find(report.config.sensitive.begin(), report.config.sensitive.end(), name) !=
               report.config.sensitive.end();
    };
    auto top10_lines = [&](const GlobalExplanation& g) {
        std::vector<std::string> lines;
        std::size_t top = std::min<std::size_t>(10, g.ranking.size());
        for (std::size_t i = 0; i < top; ++i) {
            std::ostringstream line;
            const std::string& name = g.ranking[i];
            std::string shown = is_sensitive(name) ? "[" + name + "]" : name;
            line << std::left << std::setw(26) << shown << std::right << std::setw(12)
                 << fmt(g.aggregate_of(name));
            lines.push_back(line.str());
        }
        return lines;
    };

    if (report.repaired) {
        os << "top 10 features, baseline (left) vs ensemble (right); [name] marks sensitive\n";
        auto left = top10_lines(report.global_before);
        auto right = top10_lines(report.global_after);
        for (std::size_t i = 0; i < std::max(left.size(), right.size()); ++i) {
            os << "  " << std::left << std::setw(40) << (i < left.size() ? left[i] : "") << " | "
               << (i < right.size() ? right[i] : "") << "\n";
        }
        os << "\npool (dropped features -> test accuracy / f1):\n";
        for (const auto& entry : report.pool) {
            os << "  drop {";
            for (std::size_t i = 0; i < entry.dropped.size(); ++i)
                os << (i ? ", " : "") << entry.dropped[i];
            os << "}  ->  " << pct(entry.eval.accuracy) << " / " << fmt(entry.eval.f1, 4) << "\n";
        }
        os << "\nensemble accuracy: " << pct(report.ensemble_eval.accuracy)
           << "   f1: " << fmt(report.ensemble_eval.f1, 4) << "\n";
        os << "verdict after repair: " << to_string(report.verdict_after.verdict);
        if (!report.verdict_after.sensitive_in_top_k.empty()) {
            os << "  (still in top " << report.config.k << ":";
            for (const auto& s : report.verdict_after.sensitive_in_top_k) os << " " << s;
            os << ")";
        }
        os << "\n";
    } else {
        os << "top 10 features; [name] marks sensitive\n";
        for (const auto& line : top10_lines(report.global_before)) os << "  " << line << "\n";
        os << "\nno repair action taken ("
           << (report.verdict_before.verdict == Fairness::Fair
                   ? "no sensitive feature ranked in the top k"
                   : "a single sensitive feature ranked; pass force_repair to override")
           << ")\n";
    }

    if (report.significance) {
        const auto& s = *report.significance;
        os << "\nsignificance (paired t-test over " << s.runs << " re-splits):\n";
        os << "  t = " << fmt(s.t_statistic, 4) << "   p = " << fmt(s.p_value, 6)
           << (s.degenerate ? "   [degenerate: zero-variance differences]" : "") << "\n";
        os << "  baseline accuracies:";
        for (double a : s.acc_baseline) os << " " << pct(a);
        os << "\n  ensemble accuracies:";
        for (double a : s.acc_ensemble) os << " " << pct(a);
        os << "\n";
    }
    return os.str();
}

ordered_json explanation_to_json(const LocalExplanation& ex, std::size_t row_index) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["row_index"] = row_index;
    j["predicted_class_probability"] = ex.predicted_class_probability;
    ordered_json contributions = ordered_json::array();
    for (const auto& [name, coef] : ex.contributions())
        contributions.push_back({{"feature", name}, {"coefficient", coef}});
    j["contributions"] = std::move(contributions);
    j["intercept"] = ex.intercept;
    j["fit_error"] = ex.fit_error;
    j["rank_deficient"] = ex.rank_deficient;
    j["config"] = {{"seed", ex.config.seed},
                   {"sigma", ex.config.sigma},
                   {"n_samples", ex.config.n_samples},
                   {"ridge_lambda", ex.config.ridge_lambda}};
    return j;
}

std::string explanation_to_text(const LocalExplanation& ex, std::size_t row_index) {
    std::ostringstream os;
    os << "local explanation for test row " << row_index << "\n";
    os << "predicted class-1 probability: " << fmt(ex.predicted_class_probability, 6) << "\n";
    os << "surrogate intercept: " << fmt(ex.intercept, 6)
       << "   weighted mse: " << fmt(ex.fit_error, 8) << "\n";
    os << "contributions (|coefficient| descending):\n";
    for (const auto& [name, coef] : ex.contributions())
        os << "  " << std::left << std::setw(26) << name << std::right << std::setw(12)
           << fmt(coef) << "\n";
    os << "config: seed=" << ex.config.seed << " sigma=" << fmt(ex.config.sigma, 4)
       << " n_samples=" << ex.config.n_samples << " lambda=" << fmt(ex.config.ridge_lambda, 4)
       << "\n";
    return os.str();
}

CompareResult compare_reports(const json& a, const json& b) {
    const auto features_a = a.at("dataset").at("features").get<std::vector<std::string>>();
    const auto features_b = b.at("dataset").at("features").get<std::vector<std::string>>();
    if (features_a != features_b)
        throw ComparisonError("reports describe different datasets (feature schemas differ)");

    auto final_accuracy = [](const json& r) {
        if (r.value("repaired", false)) return r.at("ensemble_eval").at("accuracy").get<double>();
        return r.at("baseline").at("eval").at("accuracy").get<double>();
    };
    auto ranking_of = [](const json& r) {
        const json& g = r.value("repaired", false) ? r.at("global_after") : r.at("global_before");
        std::vector<std::string> names;
        for (const auto& c : g.at("contributions")) names.push_back(c.at("feature").get<std::string>());
        return names;
    };
    auto contribution_of = [](const json& r, const std::string& name) -> std::optional<double> {
        const json& g = r.value("repaired", false) ? r.at("global_after") : r.at("global_before");
        for (const auto& c : g.at("contributions"))
            if (c.at("feature").get<std::string>() == name)
                return c.at("contribution").get<double>();
        return std::nullopt;
    };

    CompareResult result;
    result.accuracy_delta = final_accuracy(b) - final_accuracy(a);

    std::vector<std::string> rank_a = ranking_of(a), rank_b = ranking_of(b);
    auto pos = [](const std::vector<std::string>& v, const std::string& name) {
        auto it = std::find(v.begin(), v.end(), name);
        return it == v.end() ? static_cast<std::size_t>(-1)
                             : static_cast<std::size_t>(it - v.begin());
    };
    std::vector<std::string> sensitive =
        a.at("config").at("sensitive").get<std::vector<std::string>>();

    std::set<std::string> in_either_top10;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, rank_a.size()); ++i)
        in_either_top10.insert(rank_a[i]);
    for (std::size_t i = 0; i < std::min<std::size_t>(10, rank_b.size()); ++i)
        in_either_top10.insert(rank_b[i]);

    for (const auto& name : features_a) {
        if (!in_either_top10.count(name)) continue;
        std::size_t pa = pos(rank_a, name), pb = pos(rank_b, name);
        if (pa == pb) {
            auto ca = contribution_of(a, name), cb = contribution_of(b, name);
            if (ca && cb && *ca == *cb) continue;
        }
        std::ostringstream line;
        line << name << ": rank " << (pa == static_cast<std::size_t>(-1) ? std::string("-")
                                                                         : std::to_string(pa + 1))
             << " -> " << (pb == static_cast<std::size_t>(-1) ? std::string("-")
                                                              : std::to_string(pb + 1));
        auto ca = contribution_of(a, name), cb = contribution_of(b, name);
        if (ca && cb) line << "   contribution " << fmt(*ca) << " -> " << fmt(*cb);
        bool moved_out = pa < 10 && (pb >= 10 || pb == static_cast<std::size_t>(-1));
        bool moved_in = pb < 10 && (pa >= 10 || pa == static_cast<std::size_t>(-1));
        if (moved_out) line << "   [left top 10]";
        if (moved_in) line << "   [entered top 10]";
        result.rank_changes.push_back(line.str());
        if (std::find(sensitive.begin(), sensitive.end(), name) != sensitive.end())
            result.sensitive_rank_changes.push_back(line.str());
    }

    std::ostringstream os;
    os << "accuracy delta (B - A): " << fmt(100.0 * result.accuracy_delta, 2) << " pts\n";
    if (result.rank_changes.empty()) {
        os << "rankings: identical\n";
    } else {
        os << "ranking changes:\n";
        for (const auto& line : result.rank_changes) os << "  " << line << "\n";
    }
    if (!result.sensitive_rank_changes.empty()) {
        os << "sensitive features affected:\n";
        for (const auto& line : result.sensitive_rank_changes) os << "  " << line << "\n";
    }
    result.text = os.str();
    return result;
}

AuditArtifacts run_audit(const AuditConfig& cfg) {
    std::optional<SchemaHint> hint;
    if (!cfg.schema_hint_path.empty()) hint = SchemaHint::load(cfg.schema_hint_path);
    Dataset data = load_csv(cfg.dataset_path, hint);

    for (const auto& s : cfg.limeout.sensitive)
        if (!data.schema.index_of(s))
            throw ConfigError("sensitive: unknown feature '" + s + "'");

    auto [train, test] = train_test_split(data, cfg.limeout.test_fraction,
                                          derive_seed(cfg.limeout.seed, "split"));
    AuditArtifacts artifacts;
    artifacts.report = run_limeout(cfg.recipe, train, test, cfg.limeout);
    artifacts.report_json = audit_report_to_json(artifacts.report, cfg).dump(2) + "\n";
    artifacts.report_text = audit_report_to_text(artifacts.report);
    return artifacts;
}

}  // namespace limeout
