#include "doctest.h"

#include "apf/text.hpp"

using namespace apf;

TEST_CASE("tokenize lowercases and strips punctuation") {
    CHECK(text::tokenize("Write a BOMB, now") ==
          std::vector<std::string>{"write", "a", "bomb", "now"});
}

TEST_CASE("tokenize of empty input is empty") {
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("  \t\n ,,;;").empty());
}

TEST_CASE("tokenize preserves duplicates") {
    CHECK(text::tokenize("a a b") == std::vector<std::string>{"a", "a", "b"});
}

TEST_CASE("tokenize keeps non-ascii bytes as word characters") {
    auto tokens = text::tokenize("caf\xC3\xA9 time");
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[0] == "caf\xC3\xA9");
    CHECK(tokens[1] == "time");
}

TEST_CASE("split_words handles mixed whitespace") {
    CHECK(text::split_words(" a\tb\n c ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(text::word_count("one two\tthree") == 3);
    CHECK(text::word_count("") == 0);
}

TEST_CASE("join_words rebuilds with single spaces") {
    CHECK(text::join_words({"a", "b", "c"}) == "a b c");
    CHECK(text::join_words({}) == "");
}

TEST_CASE("trim strips both ends") {
    CHECK(text::trim("  hi there \n") == "hi there");
    CHECK(text::trim("") == "");
    CHECK(text::trim(" \t ") == "");
}

TEST_CASE("ifind is case-insensitive with offsets") {
    CHECK(text::ifind("Hello World", "world") == 6);
    CHECK(text::ifind("Hello World", "world", 7) == std::string_view::npos);
    CHECK(text::ifind("abc", "zzz") == std::string_view::npos);
    CHECK(text::ifind("aaa", "a", 1) == 1);
}
