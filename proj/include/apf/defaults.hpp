#pragma once

#include <string>
#include <vector>

// Shipped default texts and marker lists. All of these are configuration
// assets: campaigns may override any of them from the config file.

namespace apf::defaults {

// Universal refusal-style filler (R_safe role).
const std::string& safe_generic();

// Pivot sentence between the safe filler and the harmful segment (T role).
const std::string& transition();

// Predefined affirmative opening that seeds harmful continuations.
const std::string& harm_pre();

// Fixed non-adaptive fill used by the "generic" ablation arm.
const std::string& generic_fill();

// Simulator response texts.
const std::string& refusal_text();
const std::string& compliance_text();

// Marker vocabularies shared by the simulator and the bundled fixture set.
const std::vector<std::string>& harmful_markers();
const std::vector<std::string>& safe_markers();

// Heuristic judge marker phrases.
const std::vector<std::string>& compliance_markers();
const std::vector<std::string>& refusal_markers();

// Rewrite-request prompt pieces and the {question} template.
const std::string& rewrite_background_directive();
const std::string& rewrite_method_directive();
const std::string& rewrite_prompt_template();

}  // namespace apf::defaults
