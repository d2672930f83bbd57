#include "apf/prefill.hpp"

#include "apf/defaults.hpp"
#include "apf/errors.hpp"
#include "apf/text.hpp"

namespace apf {

std::string segment(const std::string& input, Fraction fraction) {
    if (input.empty()) throw PreconditionError("segment: text is empty");
    if (fraction == Fraction::Full) return input;

    const auto words = text::split_words(input);
    const std::size_t w = words.size();
    const std::size_t num = fraction == Fraction::OneThird ? 1 : 2;
    // ceil(num * w / 3) in integers
    const std::size_t keep = (num * w + 2) / 3;

    std::vector<std::string> prefix(words.begin(), words.begin() + keep);
    return text::join_words(prefix);
}

FillerConfig FillerConfig::shipped() {
    FillerConfig c;
    c.safe_generic = defaults::safe_generic();
    c.harm_pre = defaults::harm_pre();
    c.transition = defaults::transition();
    c.generate_safe_model = false;
    return c;
}

std::string safe_generic(const FillerConfig& config) {
    if (text::trim(config.safe_generic).empty()) {
        throw ConfigError("safe_generic text must not be empty");
    }
    return config.safe_generic;
}

std::string safe_model(const Question& q, ChatBackend& backend,
                       const GenerationParams& params) {
    return backend.generate(ChatTranscript::single_user(q.text), params);
}

std::string harm_continuation(const Question& q, const std::string& harm_pre,
                              ChatBackend& backend, const GenerationParams& params) {
    if (harm_pre.empty()) throw PreconditionError("harm_pre must not be empty");
    if (!backend.supports_prefill()) {
        throw CapabilityError(backend.id(), "backend '" + backend.id() +
                                                "' cannot seed continuations (no prefill)");
    }
    auto transcript = ChatTranscript::single_user(q.text, harm_pre);
    return harm_pre + backend.generate(transcript, params);
}

FillerSet build_filler_set(const Question& q, ChatBackend& backend, const FillerConfig& config,
                           const GenerationParams& params) {
    FillerSet set;
    set.question_id = q.id;
    set.safe_generic = safe_generic(config);
    if (text::trim(config.transition).empty()) {
        throw ConfigError("transition text must not be empty");
    }
    set.transition = config.transition;
    set.harm_pre = config.harm_pre;
    set.harm_model = harm_continuation(q, config.harm_pre, backend, params);
    if (config.generate_safe_model) {
        set.safe_model = safe_model(q, backend, params);
    }
    if (!set.valid()) throw Error("assembled filler set violates its invariants");
    return set;
}

}  // namespace apf
