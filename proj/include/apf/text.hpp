#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace apf::text {

// Lowercased word tokens. A token is a maximal run of ASCII alphanumerics
// (A-Z folded to a-z) or non-ASCII bytes; everything else is a separator.
// Deterministic and locale-independent.
std::vector<std::string> tokenize(std::string_view input);

// Whitespace-delimited words, original bytes preserved.
std::vector<std::string> split_words(std::string_view input);

std::string join_words(const std::vector<std::string>& words);

std::size_t word_count(std::string_view input);

std::string to_lower_ascii(std::string_view input);

// Trim ASCII whitespace from both ends.
std::string trim(std::string_view input);

bool starts_with(std::string_view s, std::string_view prefix);

// Case-insensitive substring lookup; npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0);

}  // namespace apf::text
