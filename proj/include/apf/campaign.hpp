#pragma once

#include <map>
#include <string>
#include <vector>

#include "apf/config.hpp"
#include "apf/records.hpp"
#include "apf/types.hpp"

namespace apf {

// Exact success/total pair; the decimal string is derived, never stored.
struct AsrCell {
    std::size_t successes = 0;
    std::size_t total = 0;

    bool defined() const { return total > 0; }
    double value() const { return total ? static_cast<double>(successes) / total : 0.0; }
    std::string rendered() const;
};

// Round-half-up to three decimals, trailing zeros trimmed ("0.98", "0.648",
// "0.0"); undefined cells render as an em dash.
std::string render_asr(std::size_t successes, std::size_t total);

enum class AsrGrouping {
    Overall,         // question-level, any prompt success counts the question
    PerBackend,      // question-level within each backend
    PerCombination,  // prompt-level per combination@x_source label
    PerArm,          // question-level within each ablation arm
};

// Recounts from raw records; denominators are harmful questions (or
// harmful-question prompts for PerCombination). Exact integer arithmetic.
std::map<std::string, AsrCell> compute_asr(const std::vector<AttackRecord>& records,
                                           AsrGrouping grouping);

struct CampaignReport {
    std::map<std::string, AsrCell> per_backend;  // question-level ASR
    std::map<std::string, AsrCell> matrix;       // combination@x_source -> prompt-level ASR
    std::map<std::string, AsrCell> per_arm;      // ablation arms
    AsrCell overall;
    std::size_t record_count = 0;
    std::map<std::string, std::size_t> failure_counts;  // backend -> failed attacks
    std::vector<std::string> notes;
};

CampaignReport report_from_records(const std::vector<AttackRecord>& records);

// Full pipeline over the dataset x targets x combinations grid. Appends to
// <out_dir>/records.jsonl and resumes from it: already-present keys are
// never re-attacked. Successful cases land in <out_dir>/corpus.jsonl.
CampaignReport run_campaign(const CampaignConfig& config);

// One sub-campaign per arm over the same question set; records go to
// <out_dir>/ablation_records.jsonl. Arms are the named fill strategies
// (unfilled, generic, adaptive, safe_termination, hybrid) or
// "<combination>@<x_source>" labels.
CampaignReport run_ablation(const CampaignConfig& config,
                            const std::vector<std::string>& arms);

enum class ReportFormat { Text, Csv, Json };

std::string emit_report(const CampaignReport& report, ReportFormat format);

// Questions for the configured dataset (fixture or file-backed).
std::vector<Question> load_campaign_questions(const CampaignConfig& config);

}  // namespace apf
