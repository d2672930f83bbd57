#pragma once

#include <string>

#include "apf/types.hpp"

namespace apf {

// Per-model prompt rendering rules. Each shipped template is a plain-text
// asset of `key = value` lines (with \n escapes); rendering is byte-exact
// and golden-file tested. When a transcript carries an assistant prefill,
// the rendered prompt ends with the prefill and no closing assistant
// delimiter, so the target continues from it.
struct ChatTemplate {
    std::string name;
    std::string bos;
    std::string system_prefix;
    std::string system_suffix;
    std::string user_prefix;
    std::string user_suffix;
    std::string assistant_prefix;
    std::string assistant_suffix;
    std::string assistant_open;  // emitted after the final user turn
    std::string prefill_sep;     // between assistant_open and the prefill

    static ChatTemplate builtin(const std::string& name);
    static ChatTemplate load(const std::string& path);
    static ChatTemplate parse(const std::string& name, const std::string& body);

    // Serialized asset form, parse(render) round-trips.
    std::string to_asset_text() const;
};

// Render a transcript to the single prompt string the target sees.
// Throws Error when the transcript violates its invariants.
std::string render(const ChatTemplate& tmpl, const ChatTranscript& transcript);

}  // namespace apf
