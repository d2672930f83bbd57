#include "apf/combine.hpp"

#include <fstream>

#include "json.hpp"

#include "apf/errors.hpp"
#include "apf/prefill.hpp"

namespace apf {

using nlohmann::json;

namespace {

Fraction fraction_of(CombinationKind kind) {
    switch (kind) {
        case CombinationKind::HarmThird:
        case CombinationKind::SafeTransHarmThird: return Fraction::OneThird;
        case CombinationKind::HarmTwoThirds:
        case CombinationKind::SafeTransHarmTwoThirds: return Fraction::TwoThirds;
        case CombinationKind::HarmFull:
        case CombinationKind::SafeTransHarmFull: return Fraction::Full;
    }
    throw Error("unknown combination kind");
}

bool has_safe_prefix(CombinationKind kind) {
    switch (kind) {
        case CombinationKind::SafeTransHarmThird:
        case CombinationKind::SafeTransHarmTwoThirds:
        case CombinationKind::SafeTransHarmFull: return true;
        default: return false;
    }
}

}  // namespace

AttackPrompt assemble(const std::string& x, const FillerSet& fillers, CombinationKind kind,
                      const AssembleOptions& options) {
    if (!fillers.valid()) throw PreconditionError("filler set is incomplete");

    AttackPrompt prompt;
    prompt.question_id = fillers.question_id;
    prompt.combination = kind;
    prompt.user_text = x;

    const std::string harm_segment = segment(fillers.harm_model, fraction_of(kind));
    if (has_safe_prefix(kind)) {
        const std::string& safe = (options.use_safe_model && fillers.safe_model)
                                      ? *fillers.safe_model
                                      : fillers.safe_generic;
        prompt.prefill_text = safe + "\n" + fillers.transition + "\n" + harm_segment;
    } else {
        prompt.prefill_text = harm_segment;
    }
    return prompt;
}

std::vector<AttackPrompt> enumerate_prompts(const Question& q,
                                            const std::vector<Rewrite>& rewrites,
                                            const FillerSet& fillers,
                                            const AssembleOptions& options) {
    std::vector<std::pair<std::string, XSource>> sources;
    sources.emplace_back(q.text, XSource::Original);
    std::set<std::string> seen{q.text};
    for (const Rewrite& r : rewrites) {
        if (!r.accepted) continue;
        if (!seen.insert(r.text).second) continue;
        sources.emplace_back(r.text, XSource::Rewritten);
    }

    std::vector<AttackPrompt> prompts;
    prompts.reserve(sources.size() * 6);
    for (const auto& [x, x_source] : sources) {
        for (CombinationKind kind : kAllCombinations) {
            AttackPrompt prompt = assemble(x, fillers, kind, options);
            prompt.x_source = x_source;
            prompts.push_back(std::move(prompt));
        }
    }
    return prompts;
}

SuccessCorpus::SuccessCorpus(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // fresh corpus
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            json entry = json::parse(line);
            keys_.insert(entry.at("question_id").get<std::string>() + "|" +
                         entry.at("combination").get<std::string>() + "|" +
                         entry.at("x_source").get<std::string>() + "|" +
                         entry.at("backend_id").get<std::string>());
        } catch (const json::exception&) {
            // Tolerate foreign lines; they simply never dedupe.
        }
    }
}

void SuccessCorpus::record_success(const AttackRecord& record,
                                   const std::string& question_text) {
    if (!record.final_jailbroken) throw PreconditionError("not a success");

    const std::string combination =
        record.combination ? to_string(*record.combination) : record.arm.value_or("none");
    const std::string key = record.question_id + "|" + combination + "|" +
                            to_string(record.x_source) + "|" + record.backend_id;
    if (!keys_.insert(key).second) return;

    json entry;
    entry["question_id"] = record.question_id;
    entry["question_text"] = question_text;
    entry["x_text"] = record.user_text;
    entry["x_source"] = to_string(record.x_source);
    entry["combination"] = combination;
    entry["prefill_text"] = record.prefill_text;
    entry["backend_id"] = record.backend_id;
    entry["response"] = record.response;

    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot open success corpus for append: " + path_);
    out << entry.dump() << "\n";
}

}  // namespace apf
