#pragma once

#include <string>
#include <vector>

#include "apf/backend.hpp"
#include "apf/types.hpp"

namespace apf {

// The two-directive rewrite request. The rendered prompt always contains
// both directives and the original question verbatim.
struct RewritePrompt {
    std::string background_directive;
    std::string method_directive;
    std::string question_slot;

    static RewritePrompt shipped(const std::string& question);

    // Substitutes {background_directive}, {method_directive} and {question}
    // into the template.
    std::string render(const std::string& template_text) const;
};

struct RewriteConfig {
    double threshold = 0.6;
    std::size_t attempts = 3;
    std::string prompt_template;  // empty -> shipped template

    static RewriteConfig shipped();
};

// Gated candidates in request order plus per-attempt transport errors.
// A failed attempt never aborts the remaining ones.
struct RewriteOutcome {
    std::vector<Rewrite> rewrites;
    std::vector<std::string> errors;

    std::vector<Rewrite> accepted() const;
};

RewriteOutcome rewrite_question(const Question& q, ChatBackend& backend,
                                const RewriteConfig& config,
                                const GenerationParams& params = {});

}  // namespace apf
