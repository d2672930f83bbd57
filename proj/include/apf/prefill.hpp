#pragma once

#include <optional>
#include <string>

#include "apf/backend.hpp"
#include "apf/types.hpp"

namespace apf {

// Longitudinal segmentation fractions. Kept as exact rationals so the word
// arithmetic never touches floating point.
enum class Fraction { OneThird, TwoThirds, Full };

// Prefix holding ceil(fraction * W) of the W whitespace words, rejoined
// with single spaces. Full returns the text unchanged, original whitespace
// preserved. Throws PreconditionError on empty text.
std::string segment(const std::string& text, Fraction fraction);

// Filler text assets for one campaign; all overridable from config.
struct FillerConfig {
    std::string safe_generic;
    std::string harm_pre;
    std::string transition;
    bool generate_safe_model = false;  // also request the targeted safe answer

    static FillerConfig shipped();
};

// The configured universal refusal-style answer. Throws ConfigError when
// the configured text is empty.
std::string safe_generic(const FillerConfig& config);

// Targeted safe answer: the backend's reply to the bare question.
std::string safe_model(const Question& q, ChatBackend& backend,
                       const GenerationParams& params = {});

// harm_pre plus the backend's continuation from it. The result always
// starts with harm_pre. Throws PreconditionError on an empty seed and
// CapabilityError when the backend cannot prefill.
std::string harm_continuation(const Question& q, const std::string& harm_pre,
                              ChatBackend& backend, const GenerationParams& params = {});

// All fields populated or an exception; a partial FillerSet never escapes.
FillerSet build_filler_set(const Question& q, ChatBackend& backend, const FillerConfig& config,
                           const GenerationParams& params = {});

}  // namespace apf
