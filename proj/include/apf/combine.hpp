#pragma once

#include <set>
#include <string>
#include <vector>

#include "apf/types.hpp"

namespace apf {

// One assembled attack prompt: the user turn X plus the assistant prefill
// built from filler fragments per the schema.
struct AttackPrompt {
    std::string question_id;
    XSource x_source = XSource::Original;
    CombinationKind combination = CombinationKind::HarmThird;
    std::string user_text;     // X
    std::string prefill_text;  // assembled assistant prefill
};

struct AssembleOptions {
    // Schemas 4-6 normally use the generic safe filler; this swaps in the
    // model-generated one when the filler set has it.
    bool use_safe_model = false;
};

// Deterministic concatenation. Schemas 1-3: segment(harm_model, f).
// Schemas 4-6: safe + "\n" + transition + "\n" + segment(harm_model, f),
// f in {1/3, 2/3, 1}. Requires a complete filler set.
AttackPrompt assemble(const std::string& x, const FillerSet& fillers, CombinationKind kind,
                      const AssembleOptions& options = {});

// Cartesian product of x in {original question} + accepted rewrites and the
// six schemas: original first, then rewrites in request order, schemas 1-6
// within each x. Duplicate rewrite texts collapse to one.
std::vector<AttackPrompt> enumerate_prompts(const Question& q,
                                            const std::vector<Rewrite>& rewrites,
                                            const FillerSet& fillers,
                                            const AssembleOptions& options = {});

// A successful case captured for later adversarial fine-tuning by external
// tooling. Keyed by question text, x text, and combination, per record.
struct SuccessCorpusEntry {
    std::string question_id;
    std::string question_text;
    std::string x_text;
    XSource x_source = XSource::Original;
    std::string combination;
    std::string prefill_text;
    std::string backend_id;
    std::string response;
};

// Append-only JSON-lines corpus with idempotent writes: re-recording the
// same (question_id, combination, x_source, backend_id) is a no-op.
// Writes must come from a single thread.
class SuccessCorpus {
  public:
    explicit SuccessCorpus(std::string path);

    // Throws PreconditionError unless record.final_jailbroken.
    void record_success(const AttackRecord& record, const std::string& question_text);

    std::size_t size() const { return keys_.size(); }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::set<std::string> keys_;
};

}  // namespace apf
