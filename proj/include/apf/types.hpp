#pragma once

#include <optional>
#include <string>
#include <vector>

namespace apf {

// One harmful question from a dataset.
struct Question {
    std::string id;
    std::string text;
    std::optional<std::string> category;  // risk scenario label when the dataset has one

    bool is_benign() const { return category && *category == "benign"; }
};

// A candidate rewriting of a question, gated by TF-IDF cosine similarity.
struct Rewrite {
    std::string source_id;
    std::string text;
    double similarity = 0.0;  // in [0,1]
    bool accepted = false;    // similarity >= configured threshold
};

// The pre-fill texts assembled for one question.
struct FillerSet {
    std::string question_id;
    std::string safe_generic;               // universal refusal-style answer
    std::optional<std::string> safe_model;  // backend-generated safe answer, when enabled
    std::string harm_pre;                   // predefined affirmative opening
    std::string harm_model;                 // harm_pre + backend continuation
    std::string transition;                 // pivot phrase between safe and harmful parts

    // harm_model must extend harm_pre; safe_generic and transition non-empty.
    bool valid() const;
};

// The six prompt schemas. 1-3 use a harmful segment alone; 4-6 prepend the
// safe filler and the transition.
enum class CombinationKind {
    HarmThird,
    HarmTwoThirds,
    HarmFull,
    SafeTransHarmThird,
    SafeTransHarmTwoThirds,
    SafeTransHarmFull,
};

inline constexpr CombinationKind kAllCombinations[] = {
    CombinationKind::HarmThird,          CombinationKind::HarmTwoThirds,
    CombinationKind::HarmFull,           CombinationKind::SafeTransHarmThird,
    CombinationKind::SafeTransHarmTwoThirds, CombinationKind::SafeTransHarmFull,
};

// Whether the user turn carries the original question or a rewrite.
enum class XSource { Original, Rewritten };

std::string to_string(CombinationKind kind);
CombinationKind combination_from_string(const std::string& s);
std::string to_string(XSource source);
XSource x_source_from_string(const std::string& s);

// "kind@source" label used in record keys and reports.
std::string combo_label(CombinationKind kind, XSource source);
std::pair<CombinationKind, XSource> parse_combo_label(const std::string& label);

enum class Role { User, Assistant };

struct Turn {
    Role role;
    std::string text;
};

// Role-tagged conversation plus an optional forced assistant prefix.
struct ChatTranscript {
    std::optional<std::string> system;
    std::vector<Turn> turns;
    std::optional<std::string> assistant_prefill;

    // Roles must alternate starting with user; a prefill requires the last
    // turn to be a user turn. Returns an explanation when invalid.
    std::optional<std::string> violation() const;

    static ChatTranscript single_user(std::string user_text,
                                      std::optional<std::string> prefill = std::nullopt);
};

// One judge's decision about one response.
struct JudgeVerdict {
    std::string judge_id;
    bool jailbroken = false;
    std::optional<double> score;     // in [0,1] when present
    std::optional<std::string> raw;  // provider payload, verbatim
};

enum class MergePolicy { Any, All, Majority };

std::string to_string(MergePolicy policy);
MergePolicy merge_policy_from_string(const std::string& s);

// Merge judge verdicts into one flag. Majority ties resolve to false.
// Throws PreconditionError on an empty list.
bool merge_verdicts(const std::vector<JudgeVerdict>& verdicts, MergePolicy policy);

// Full provenance for one attack attempt.
struct AttackRecord {
    std::string question_id;
    bool question_harmful = true;
    XSource x_source = XSource::Original;
    std::optional<CombinationKind> combination;  // unset for non-schema ablation arms
    std::optional<std::string> arm;              // ablation arm label, when applicable
    std::string user_text;
    std::string prefill_text;
    std::string rendered_prompt;
    std::string backend_id;
    std::string response;  // prefill + continuation
    std::vector<JudgeVerdict> verdicts;
    std::vector<std::string> judge_errors;  // providers that failed to answer
    bool final_jailbroken = false;
    std::optional<bool> manual_override;
    std::optional<std::string> error;  // backend failure, when the attack never ran
    std::string started_at;
    std::string finished_at;

    // question_id|x_source|combination-or-arm|backend_id
    std::string key() const;

    // manual_override when present, else merge_verdicts. Records with no
    // verdicts (failed attacks) stay false.
    void recompute_final(MergePolicy policy);
};

}  // namespace apf
