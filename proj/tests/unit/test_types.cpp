#include "doctest.h"

#include "apf/errors.hpp"
#include "apf/types.hpp"

using namespace apf;

TEST_CASE("merge_verdicts policies") {
    auto v = [](bool flag) {
        JudgeVerdict verdict;
        verdict.judge_id = "t";
        verdict.jailbroken = flag;
        return verdict;
    };

    CHECK(merge_verdicts({v(true)}, MergePolicy::Any));
    CHECK_FALSE(merge_verdicts({v(true), v(false)}, MergePolicy::All));

    // majority oracle: count comparison
    std::vector<JudgeVerdict> three{v(true), v(false), v(true)};
    std::size_t yes = 0;
    for (const auto& verdict : three) {
        if (verdict.jailbroken) ++yes;
    }
    const bool expected = 2 * yes > three.size();
    CHECK(expected);
    CHECK(merge_verdicts(three, MergePolicy::Majority) == expected);

    // ties resolve to false
    CHECK_FALSE(merge_verdicts({v(true), v(false)}, MergePolicy::Majority));
}

TEST_CASE("merge_verdicts rejects an empty list") {
    CHECK_THROWS_AS(merge_verdicts({}, MergePolicy::Any), PreconditionError);
    CHECK_THROWS_WITH(merge_verdicts({}, MergePolicy::Any), "no verdicts");
}

TEST_CASE("combination and x_source round-trip for all 12 pairs") {
    for (CombinationKind kind : kAllCombinations) {
        for (XSource source : {XSource::Original, XSource::Rewritten}) {
            auto label = combo_label(kind, source);
            auto [kind2, source2] = parse_combo_label(label);
            CHECK(kind2 == kind);
            CHECK(source2 == source);
        }
    }
    CHECK_THROWS_AS(combination_from_string("nope"), Error);
    CHECK_THROWS_AS(parse_combo_label("missing-at"), Error);
}

TEST_CASE("transcript invariants") {
    ChatTranscript ok = ChatTranscript::single_user("hi", "prefix");
    CHECK_FALSE(ok.violation().has_value());

    ChatTranscript empty;
    CHECK(empty.violation().has_value());

    ChatTranscript assistant_first;
    assistant_first.turns.push_back({Role::Assistant, "hello"});
    CHECK(assistant_first.violation().has_value());

    ChatTranscript prefill_after_assistant;
    prefill_after_assistant.turns.push_back({Role::User, "q"});
    prefill_after_assistant.turns.push_back({Role::Assistant, "a"});
    prefill_after_assistant.assistant_prefill = "p";
    CHECK(prefill_after_assistant.violation().has_value());

    // multi-turn alternation is fine
    ChatTranscript multi;
    multi.turns = {{Role::User, "q1"}, {Role::Assistant, "a1"}, {Role::User, "q2"}};
    multi.assistant_prefill = "p";
    CHECK_FALSE(multi.violation().has_value());
}

TEST_CASE("filler set invariant: harm_model extends harm_pre") {
    FillerSet set;
    set.question_id = "q";
    set.safe_generic = "safe";
    set.transition = "t";
    set.harm_pre = "Sure,";
    set.harm_model = "Sure, and then";
    CHECK(set.valid());

    set.harm_model = "Different opening";
    CHECK_FALSE(set.valid());

    set.harm_model = "Sure, and then";
    set.safe_generic = "";
    CHECK_FALSE(set.valid());
}

TEST_CASE("record final flag honors manual override, else merges") {
    AttackRecord record;
    record.verdicts.push_back({"h", true, std::nullopt, std::nullopt});
    record.recompute_final(MergePolicy::Any);
    CHECK(record.final_jailbroken);

    record.manual_override = false;
    record.recompute_final(MergePolicy::Any);
    CHECK_FALSE(record.final_jailbroken);

    AttackRecord no_verdicts;
    no_verdicts.recompute_final(MergePolicy::Any);
    CHECK_FALSE(no_verdicts.final_jailbroken);
}

TEST_CASE("record key prefers the ablation arm") {
    AttackRecord record;
    record.question_id = "fx01";
    record.backend_id = "sim";
    record.combination = CombinationKind::HarmFull;
    CHECK(record.key() == "fx01|original|harm_full|sim");
    record.arm = "adaptive";
    CHECK(record.key() == "fx01|original|adaptive|sim");
}
