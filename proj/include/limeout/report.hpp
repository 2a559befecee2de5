#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "limeout/audit.hpp"

namespace limeout {

inline constexpr int kReportSchemaVersion = 1;

// File-level audit configuration; one JSON file holds every knob so a report
// can be reproduced from its config echo alone. Unknown keys are rejected
// with the key name in the diagnostic.
struct AuditConfig {
    std::string dataset_path;
    std::string schema_hint_path;  // empty = infer kinds, last column is target
    TrainingRecipe recipe;
    LimeOutConfig limeout;
    std::string output_dir = ".";
};

AuditConfig audit_config_from_json(const nlohmann::json& j);
AuditConfig load_audit_config(const std::string& path);
nlohmann::ordered_json audit_config_to_json(const AuditConfig& cfg);

nlohmann::ordered_json audit_report_to_json(const AuditReport& report, const AuditConfig& cfg);
std::string audit_report_to_text(const AuditReport& report);

nlohmann::ordered_json explanation_to_json(const LocalExplanation& ex, std::size_t row_index);
std::string explanation_to_text(const LocalExplanation& ex, std::size_t row_index);

struct CompareResult {
    double accuracy_delta = 0.0;  // final accuracy of B minus A
    std::vector<std::string> rank_changes;           // human-readable lines
    std::vector<std::string> sensitive_rank_changes; // subset affecting sensitive features
    bool identical() const { return rank_changes.empty() && accuracy_delta == 0.0; }
    std::string text;
};

// Side-by-side diff of two machine-readable reports; throws ComparisonError
// when they do not describe the same dataset schema.
CompareResult compare_reports(const nlohmann::json& a, const nlohmann::json& b);

// End-to-end driver behind the audit subcommand: load, split, run, render.
struct AuditArtifacts {
    AuditReport report;
    std::string report_json;
    std::string report_text;
};
AuditArtifacts run_audit(const AuditConfig& cfg);

}  // namespace limeout
