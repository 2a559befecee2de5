#include "limeout/audit.hpp"

#include <algorithm>
#include <cmath>

#include "limeout/parallel.hpp"
#include "limeout/random.hpp"

namespace limeout {

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    // Continued fraction (modified Lentz); converges fast for x < (a+1)/(a+b+2).
    auto betacf = [](double a_, double b_, double x_) {
        const double tiny = 1e-300;
        const int max_iter = 300;
        double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0, d = 1.0 - qab * x_ / qap;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= max_iter; ++m) {
            double m2 = 2.0 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-14) break;
        }
        return h;
    };

    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int df) {
    if (df < 1) throw ArgumentError("student_t_two_sided_p: df must be >= 1");
    double v = static_cast<double>(df);
    return regularized_incomplete_beta(v / 2.0, 0.5, v / (v + t * t));
}

SignificanceResult significance_test(const std::vector<double>& acc_a,
                                     const std::vector<double>& acc_b) {
    if (acc_a.size() != acc_b.size())
        throw ArgumentError("significance_test: vectors differ in length");
    if (acc_a.size() < 2) throw ArgumentError("significance_test: need at least 2 runs");

    const std::size_t n = acc_a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += acc_a[i] - acc_b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = acc_a[i] - acc_b[i] - mean;
        ss += d * d;
    }
    double sd = std::sqrt(ss / static_cast<double>(n - 1));

    SignificanceResult r;
    r.runs = static_cast<int>(n);
    r.acc_baseline = acc_a;
    r.acc_ensemble = acc_b;
    if (sd == 0.0) {
        if (mean == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = 0.0;
            r.p_value = 0.0;
            r.degenerate = true;
        }
        return r;
    }
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<int>(n) - 1);
    return r;
}

std::vector<ModelPtr> build_dropout_pool(
    const TrainingRecipe& recipe, const Dataset& train,
    const std::vector<std::string>& flagged,
    const std::map<std::string, std::vector<std::string>>& companions, std::uint64_t seed) {
    if (flagged.empty()) throw ArgumentError("build_dropout_pool: no flagged features");

    auto drop_set_for = [&](const std::string& feature) {
        std::vector<std::string> drop{feature};
        auto it = companions.find(feature);
        if (it != companions.end())
            drop.insert(drop.end(), it->second.begin(), it->second.end());
        return drop;
    };

    std::vector<std::vector<std::string>> drop_sets;
    for (const auto& f : flagged) drop_sets.push_back(drop_set_for(f));
    std::vector<std::string> all;
    for (const auto& ds : drop_sets)
        for (const auto& f : ds)
            if (std::find(all.begin(), all.end(), f) == all.end()) all.push_back(f);
    drop_sets.push_back(all);

    for (const auto& ds : drop_sets)
        if (ds.size() >= train.n_features())
            throw ConfigError("dropout pool would remove every feature");

    std::vector<ModelPtr> pool(drop_sets.size());
    parallel_for(drop_sets.size(), [&](std::size_t k) {
        pool[k] = drop_features(recipe, train, drop_sets[k], derive_seed(seed, "pool-member", k));
    });
    return pool;
}

namespace {

Dataset balance_for_training(const Dataset& train, const SmoteSettings& smote,
                             std::uint64_t seed) {
    if (!smote.enabled) return train;
    std::size_t n1 = 0;
    for (int y : train.labels) n1 += static_cast<std::size_t>(y);
    if (n1 == 0 || n1 == train.n_rows()) return train;  // single class: leave as-is
    return smote_oversample(train, smote.k_neighbors, seed);
}

// Trains one classifier the way the audit trains everything: fit on the
// balanced data, then tune the threshold on the validation fold.
ModelPtr train_member(const TrainingRecipe& recipe, const Dataset& balanced,
                      const Dataset& validation, bool has_validation,
                      const std::vector<std::string>& dropped, std::uint64_t seed) {
    TrainingRecipe fit_only = recipe;
    fit_only.tune = false;
    ModelPtr m = drop_features(fit_only, balanced, dropped, seed);
    if (recipe.tune) tune_threshold(m, has_validation ? validation : balanced);
    return m;
}

}  // namespace

PreparedTraining prepare_training(const Dataset& train, const LimeOutConfig& cfg,
                                  std::uint64_t seed) {
    PreparedTraining out;
    if (cfg.validation_fraction > 0.0 && train.n_rows() >= 10) {
        auto [fit_part, val] =
            train_test_split(train, cfg.validation_fraction, derive_seed(seed, "validation"));
        out.validation = std::move(val);
        out.has_validation = true;
        out.balanced = balance_for_training(fit_part, cfg.smote, derive_seed(seed, "smote"));
    } else {
        out.balanced = balance_for_training(train, cfg.smote, derive_seed(seed, "smote"));
    }
    return out;
}

AuditReport run_limeout(const TrainingRecipe& recipe, const Dataset& train, const Dataset& test,
                        const LimeOutConfig& cfg) {
    if (cfg.sensitive.empty())
        throw ConfigError("sensitive: an audit needs at least one sensitive feature");
    for (const auto& s : cfg.sensitive)
        if (!train.schema.index_of(s))
            throw ConfigError("sensitive: unknown feature '" + s + "'");
    if (cfg.k < 1) throw ConfigError("k: must be >= 1");

    AuditReport report;
    report.recipe = recipe;
    report.config = cfg;
    for (const auto& f : train.schema.features) report.feature_names.push_back(f.name);
    report.target_name = train.schema.target;
    report.n_train = train.n_rows();
    report.n_test = test.n_rows();

    PreparedTraining prep = prepare_training(train, cfg, cfg.seed);
    ModelPtr baseline = train_member(recipe, prep.balanced, prep.validation,
                                     prep.has_validation, {}, derive_seed(cfg.seed, "baseline"));
    report.baseline_eval = evaluate(*baseline, test);
    report.baseline_threshold = baseline->decision_threshold();

    FeatureStats stats = compute_stats(prep.balanced, 4);
    Discretizer disc(stats, 4);

    GlobalConfig before_cfg = cfg.global;
    before_cfg.seed = derive_seed(cfg.seed, "lime-before");
    report.global_before = lime_global(*baseline, test, disc, before_cfg);
    report.verdict_before = assess_fairness(report.global_before, cfg.sensitive, cfg.k);

    bool repair = report.verdict_before.verdict == Fairness::Unfair ||
                  (report.verdict_before.verdict == Fairness::SingleSensitive && cfg.force_repair);
    if (!repair) {
        report.repaired = false;
        report.global_after = report.global_before;
        report.verdict_after = report.verdict_before;
        return report;
    }

    // Flagged features keep the user's declared order; each drags its
    // correlated companions into the drop set.
    for (const auto& s : cfg.sensitive) {
        const auto& hits = report.verdict_before.sensitive_in_top_k;
        if (std::find(hits.begin(), hits.end(), s) != hits.end()) report.flagged.push_back(s);
    }
    for (const auto& f : report.flagged)
        report.companions[f] = correlated_features(train, {f}, cfg.correlation_threshold);

    TrainingRecipe fit_only = recipe;
    fit_only.tune = false;
    std::vector<ModelPtr> pool = build_dropout_pool(fit_only, prep.balanced, report.flagged,
                                                    report.companions,
                                                    derive_seed(cfg.seed, "pool"));
    for (const auto& member : pool) {
        if (recipe.tune)
            tune_threshold(member, prep.has_validation ? prep.validation : prep.balanced);
        auto* wrapper = dynamic_cast<const DropoutModel*>(member.get());
        PoolEntry entry;
        entry.dropped = wrapper ? wrapper->dropped_features() : std::vector<std::string>{};
        entry.eval = evaluate(*member, test);
        report.pool.push_back(std::move(entry));
    }

    // The averaged ensemble's threshold is tuned on the same fold as every
    // member; a fixed 0.5 cannot track members that systematically shift
    // their probabilities after oversampled training.
    ModelPtr ensemble = ensemble_average(pool);
    if (recipe.tune)
        tune_threshold(ensemble, prep.has_validation ? prep.validation : prep.balanced);
    report.ensemble_eval = evaluate(*ensemble, test);
    report.repaired = true;

    GlobalConfig after_cfg = cfg.global;
    after_cfg.seed = derive_seed(cfg.seed, "lime-after");
    report.global_after = lime_global(*ensemble, test, disc, after_cfg);
    report.verdict_after = assess_fairness(report.global_after, cfg.sensitive, cfg.k);

    // Paired accuracy comparison over seeded re-splits of the pooled data;
    // the flagged set stays fixed so every run trains the same pool shape.
    if (cfg.runs >= 2) {
        Dataset full = concat_rows(train, test);
        double fraction = static_cast<double>(test.n_rows()) / static_cast<double>(full.n_rows());
        if (fraction <= 0.0 || fraction >= 1.0) fraction = cfg.test_fraction;
        std::vector<double> acc_base(cfg.runs), acc_ens(cfg.runs);
        parallel_for(static_cast<std::size_t>(cfg.runs), [&](std::size_t r) {
            auto [tr, te] = train_test_split(full, fraction, derive_seed(cfg.seed, "sig-split", r));
            PreparedTraining prep_r = prepare_training(tr, cfg, derive_seed(cfg.seed, "sig", r));
            ModelPtr base_r = train_member(recipe, prep_r.balanced, prep_r.validation,
                                           prep_r.has_validation, {},
                                           derive_seed(cfg.seed, "sig-train", r));
            TrainingRecipe fit_r = recipe;
            fit_r.tune = false;
            std::vector<ModelPtr> pool_r =
                build_dropout_pool(fit_r, prep_r.balanced, report.flagged, report.companions,
                                   derive_seed(cfg.seed, "sig-pool", r));
            ModelPtr ens_r = ensemble_average(pool_r);
            if (recipe.tune)
                tune_threshold(ens_r, prep_r.has_validation ? prep_r.validation : prep_r.balanced);
            acc_base[r] = evaluate(*base_r, te).accuracy;
            acc_ens[r] = evaluate(*ens_r, te).accuracy;
        });
        report.significance = significance_test(acc_base, acc_ens);
    }
    return report;
}

}  // namespace limeout
