#include "apf/rewrite.hpp"

#include "apf/defaults.hpp"
#include "apf/errors.hpp"
#include "apf/similarity.hpp"
#include "apf/text.hpp"

namespace apf {

namespace {

void replace_all(std::string& s, const std::string& placeholder, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(placeholder, pos)) != std::string::npos) {
        s.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
}

}  // namespace

RewritePrompt RewritePrompt::shipped(const std::string& question) {
    RewritePrompt p;
    p.background_directive = defaults::rewrite_background_directive();
    p.method_directive = defaults::rewrite_method_directive();
    p.question_slot = question;
    return p;
}

std::string RewritePrompt::render(const std::string& template_text) const {
    std::string out = template_text;
    replace_all(out, "{background_directive}", background_directive);
    replace_all(out, "{method_directive}", method_directive);
    replace_all(out, "{question}", question_slot);
    return out;
}

RewriteConfig RewriteConfig::shipped() {
    RewriteConfig c;
    c.prompt_template = defaults::rewrite_prompt_template();
    return c;
}

std::vector<Rewrite> RewriteOutcome::accepted() const {
    std::vector<Rewrite> out;
    for (const Rewrite& r : rewrites) {
        if (r.accepted) out.push_back(r);
    }
    return out;
}

RewriteOutcome rewrite_question(const Question& q, ChatBackend& backend,
                                const RewriteConfig& config, const GenerationParams& params) {
    if (config.attempts == 0) throw PreconditionError("rewrite attempts must be >= 1");

    const std::string& tmpl =
        config.prompt_template.empty() ? defaults::rewrite_prompt_template()
                                       : config.prompt_template;
    const std::string prompt = RewritePrompt::shipped(q.text).render(tmpl);

    RewriteOutcome outcome;
    for (std::size_t attempt = 0; attempt < config.attempts; ++attempt) {
        std::string candidate;
        try {
            candidate = backend.generate(ChatTranscript::single_user(prompt), params);
        } catch (const BackendError& e) {
            outcome.errors.push_back("attempt " + std::to_string(attempt + 1) + ": " +
                                     e.what());
            continue;
        }
        candidate = text::trim(candidate);
        if (candidate.empty()) {
            outcome.errors.push_back("attempt " + std::to_string(attempt + 1) +
                                     ": empty candidate");
            continue;
        }
        outcome.rewrites.push_back(gate(q, candidate, config.threshold));
    }
    return outcome;
}

}  // namespace apf
