#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apf/chat_template.hpp"
#include "apf/types.hpp"

namespace apf {

// Decoding settings. Harness default is greedy generation; temperature is
// ignored while sampling is off.
struct GenerationParams {
    bool sampling = false;
    double temperature = 0.0;
    std::uint32_t max_new_tokens = 512;
};

// Uniform chat-backend surface. generate() returns the continuation only;
// callers reconstruct prefill + continuation when they need the full
// response. Implementations must be safe to share across threads.
class ChatBackend {
  public:
    virtual ~ChatBackend() = default;
    virtual const std::string& id() const = 0;
    virtual bool supports_prefill() const = 0;
    virtual std::string generate(const ChatTranscript& transcript,
                                 const GenerationParams& params) = 0;
};

// Knobs of the deterministic shallow-alignment simulator. The depth k is
// the number of leading words the simulated alignment actually inspects;
// the value is arbitrary and exists to make "shallow" testable.
struct SimTargetConfig {
    std::size_t defense_depth_words = 20;  // k
    std::string refusal_text;
    std::string compliance_text;
    std::vector<std::string> harmful_markers;
    std::vector<std::string> safe_markers;

    static SimTargetConfig shipped();
};

// Deterministic rule deciding what the simulated target answers. p is the
// assistant prefill (possibly empty). For a harmful question (one whose
// last user text contains a harmful marker):
//   - short p with no safe marker in its first k words -> refusal;
//   - p of k+ words whose tail past the first k continues the question's
//     harmful topic (shares a harmful marker with it) -> compliance;
//   - p that opens safely (safe marker within the first k words) and later
//     carries such a continuation seed -> compliance regardless of length,
//     modeling the pseudo-termination lapse;
//   - anything else -> refusal.
// Benign questions always get the compliance text.
std::string sim_generate(const SimTargetConfig& config, const ChatTranscript& transcript);

// Simulator backend. Target mode applies sim_generate; Compliant mode is
// the stand-in for the fine-tuned generation models and returns scripted
// rewrites, safe answers, and prefill continuations.
class SimBackend final : public ChatBackend {
  public:
    enum class Mode { Target, Compliant };

    SimBackend(std::string id, SimTargetConfig config, Mode mode = Mode::Target);

    const std::string& id() const override { return id_; }
    bool supports_prefill() const override { return true; }
    std::string generate(const ChatTranscript& transcript,
                         const GenerationParams& params) override;

    const SimTargetConfig& config() const { return config_; }

  private:
    std::string scripted(const ChatTranscript& transcript) const;

    std::string id_;
    SimTargetConfig config_;
    Mode mode_;
};

// Deterministic continuation the compliant simulator writes after an
// assistant prefill; exposed for fixture tests.
std::string scripted_continuation(const std::string& user_text, const std::string& prefill,
                                  const SimTargetConfig& config);

}  // namespace apf
