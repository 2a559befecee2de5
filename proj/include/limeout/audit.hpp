#pragma once

#include <map>
#include <optional>

#include "limeout/compose.hpp"
#include "limeout/global_explain.hpp"
#include "limeout/smote.hpp"

namespace limeout {

struct SmoteSettings {
    bool enabled = true;
    int k_neighbors = 5;
};

struct LimeOutConfig {
    std::vector<std::string> sensitive;
    int k = 10;
    double correlation_threshold = 0.85;
    GlobalConfig global;
    SmoteSettings smote;
    std::uint64_t seed = 0;     // master seed; every stage derives from it
    int runs = 10;              // significance re-split count
    double test_fraction = 0.2; // used by significance re-splits
    // Fraction of the training split held out (before oversampling) as the
    // threshold-tuning fold; 0 tunes on the balanced training data itself.
    double validation_fraction = 0.1;
    bool force_repair = false;  // repair even on a single-sensitive verdict
};

struct PoolEntry {
    std::vector<std::string> dropped;
    EvalReport eval;
};

struct SignificanceResult {
    double t_statistic = 0.0;
    double p_value = 1.0;
    int runs = 0;
    bool degenerate = false;  // zero-variance differences with nonzero mean
    std::vector<double> acc_baseline, acc_ensemble;
};

// Paired two-sided t-test on per-run accuracy differences. Zero-variance
// differences give t=0, p=1 when the mean is zero too, otherwise p=0 with
// the degenerate flag set.
SignificanceResult significance_test(const std::vector<double>& acc_a,
                                     const std::vector<double>& acc_b);

// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, int df);

// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// Trains the i+1 dropout classifiers: one per flagged feature (plus its
// correlated companions) and one dropping all of them together.
std::vector<ModelPtr> build_dropout_pool(
    const TrainingRecipe& recipe, const Dataset& train,
    const std::vector<std::string>& flagged,
    const std::map<std::string, std::vector<std::string>>& companions, std::uint64_t seed);

struct AuditReport {
    TrainingRecipe recipe;
    LimeOutConfig config;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::size_t n_train = 0, n_test = 0;

    FairnessVerdict verdict_before, verdict_after;
    GlobalExplanation global_before, global_after;
    EvalReport baseline_eval;
    double baseline_threshold = 0.5;

    bool repaired = false;  // pool built and ensemble formed
    std::vector<std::string> flagged;  // sensitive features found in the top k
    std::map<std::string, std::vector<std::string>> companions;
    std::vector<PoolEntry> pool;
    EvalReport ensemble_eval;
    std::optional<SignificanceResult> significance;

    // Live handles for downstream analysis; not part of the serialized report.
    ModelPtr baseline_model;
    ModelPtr ensemble_model;
    std::vector<ModelPtr> pool_models;
};

// Training data as the audit prepares it: the balanced fitting set plus the
// held-out fold every decision threshold is tuned on.
struct PreparedTraining {
    Dataset balanced;
    Dataset validation;
    bool has_validation = false;
};
PreparedTraining prepare_training(const Dataset& train, const LimeOutConfig& cfg,
                                  std::uint64_t seed);

// The full pipeline: train the baseline on the (optionally SMOTE-balanced)
// training set, judge process fairness through the global explanation, and
// on an unfair verdict build the dropout pool, ensemble it, re-explain and
// test the accuracy change for significance. Fair and single-sensitive
// verdicts take no repair action unless force_repair is set. Thresholds
// (baseline, pool members and the ensemble alike) are tuned on the held-out
// validation fold when recipe.tune is set.
AuditReport run_limeout(const TrainingRecipe& recipe, const Dataset& train, const Dataset& test,
                        const LimeOutConfig& cfg);

}  // namespace limeout
