#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "apf/combine.hpp"
#include "apf/errors.hpp"

using namespace apf;

namespace {

FillerSet make_fillers() {
    FillerSet set;
    set.question_id = "q1";
    set.safe_generic = "S.";
    set.transition = "T.";
    set.harm_pre = "a";
    set.harm_model = "a b c";
    return set;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "apf_combine_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::filesystem::remove(path);
    return path;
}

AttackRecord success_record() {
    AttackRecord r;
    r.question_id = "q1";
    r.x_source = XSource::Original;
    r.combination = CombinationKind::SafeTransHarmThird;
    r.user_text = "x text";
    r.prefill_text = "S.\nT.\na";
    r.backend_id = "sim";
    r.response = "full response";
    r.final_jailbroken = true;
    return r;
}

}  // namespace

TEST_CASE("schema 3 is the untouched harmful filler") {
    AttackPrompt p = assemble("x", make_fillers(), CombinationKind::HarmFull);
    CHECK(p.prefill_text == "a b c");
    CHECK(p.user_text == "x");
    CHECK(p.question_id == "q1");
}

TEST_CASE("schema 4 concatenates safe, transition, and the 1/3 segment") {
    AttackPrompt p = assemble("x", make_fillers(), CombinationKind::SafeTransHarmThird);
    CHECK(p.prefill_text == "S.\nT.\na");  // ceil(3/3)=1 word of "a b c"
}

TEST_CASE("schema 1 keeps the leading third of the harmful filler") {
    FillerSet set = make_fillers();
    set.harm_pre = "a";
    set.harm_model = "a b c d e f";
    AttackPrompt p = assemble("x", set, CombinationKind::HarmThird);
    CHECK(p.prefill_text == "a b");
}

TEST_CASE("all six schemas produce their exact concatenations") {
    FillerSet set = make_fillers();
    set.harm_model = "a b c d e f";  // thirds: 2 and 4 words
    auto text_of = [&](CombinationKind kind) {
        return assemble("x", set, kind).prefill_text;
    };
    CHECK(text_of(CombinationKind::HarmThird) == "a b");
    CHECK(text_of(CombinationKind::HarmTwoThirds) == "a b c d");
    CHECK(text_of(CombinationKind::HarmFull) == "a b c d e f");
    CHECK(text_of(CombinationKind::SafeTransHarmThird) == "S.\nT.\na b");
    CHECK(text_of(CombinationKind::SafeTransHarmTwoThirds) == "S.\nT.\na b c d");
    CHECK(text_of(CombinationKind::SafeTransHarmFull) == "S.\nT.\na b c d e f");
}

TEST_CASE("assemble is injective over kinds for distinct non-empty parts") {
    FillerSet set = make_fillers();
    set.harm_model = "a b c";  // 3+ words so the three segments differ
    std::set<std::string> outputs;
    for (CombinationKind kind : kAllCombinations) {
        outputs.insert(assemble("x", set, kind).prefill_text);
    }
    CHECK(outputs.size() == 6);
}

TEST_CASE("assemble can swap in the model-generated safe answer") {
    FillerSet set = make_fillers();
    set.safe_model = "M.";
    AssembleOptions options;
    options.use_safe_model = true;
    CHECK(assemble("x", set, CombinationKind::SafeTransHarmFull, options).prefill_text ==
          "M.\nT.\na b c");
    // without the flag the generic text stays
    CHECK(assemble("x", set, CombinationKind::SafeTransHarmFull).prefill_text ==
          "S.\nT.\na b c");
}

TEST_CASE("assemble rejects incomplete filler sets") {
    FillerSet set = make_fillers();
    set.harm_model = "unrelated";  // breaks the prefix invariant
    CHECK_THROWS_AS(assemble("x", set, CombinationKind::HarmFull), PreconditionError);
}

TEST_CASE("enumerate_prompts is 6 x (1 + accepted rewrites), fixed order, deduped") {
    Question q{"q1", "orig text", std::nullopt};
    std::vector<Rewrite> rewrites;
    rewrites.push_back({"q1", "rewrite one", 0.9, true});
    rewrites.push_back({"q1", "rejected", 0.1, false});
    rewrites.push_back({"q1", "rewrite one", 0.9, true});  // duplicate text
    rewrites.push_back({"q1", "rewrite two", 0.8, true});

    auto prompts = enumerate_prompts(q, rewrites, make_fillers());
    CHECK(prompts.size() == 6 * 3);  // original + two distinct accepted rewrites

    // original comes first, schemas in order 1..6
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(prompts[i].x_source == XSource::Original);
        CHECK(prompts[i].combination == kAllCombinations[i]);
        CHECK(prompts[i].user_text == "orig text");
    }
    CHECK(prompts[6].user_text == "rewrite one");
    CHECK(prompts[6].x_source == XSource::Rewritten);
    CHECK(prompts[12].user_text == "rewrite two");

    // no duplicates overall
    std::set<std::string> keys;
    for (const auto& p : prompts) {
        keys.insert(p.user_text + "|" + to_string(p.combination));
    }
    CHECK(keys.size() == prompts.size());
}

TEST_CASE("enumerate_prompts with no accepted rewrites still covers the original") {
    Question q{"q1", "orig text", std::nullopt};
    std::vector<Rewrite> rejected{{"q1", "nope", 0.0, false}};
    auto prompts = enumerate_prompts(q, rejected, make_fillers());
    CHECK(prompts.size() == 6);
    for (const auto& p : prompts) CHECK(p.x_source == XSource::Original);
}

TEST_CASE("success corpus appends exactly once per key") {
    auto path = temp_file("corpus.jsonl");
    {
        SuccessCorpus corpus(path.string());
        corpus.record_success(success_record(), "question text");
        corpus.record_success(success_record(), "question text");  // same key
        CHECK(corpus.size() == 1);
    }

    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++lines;
    }
    CHECK(lines == 1);

    // reopening picks the keys back up: still idempotent
    SuccessCorpus reopened(path.string());
    CHECK(reopened.size() == 1);
    reopened.record_success(success_record(), "question text");
    CHECK(reopened.size() == 1);

    AttackRecord other = success_record();
    other.backend_id = "other";
    reopened.record_success(other, "question text");
    CHECK(reopened.size() == 2);
}

TEST_CASE("success corpus refuses non-successes") {
    auto path = temp_file("corpus_refuse.jsonl");
    SuccessCorpus corpus(path.string());
    AttackRecord r = success_record();
    r.final_jailbroken = false;
    CHECK_THROWS_WITH_AS(corpus.record_success(r, "q"), "not a success", PreconditionError);
}
