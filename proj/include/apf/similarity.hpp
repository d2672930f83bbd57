#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "apf/types.hpp"

namespace apf {

// Sparse TF-IDF vector. Weights are finite and non-negative; an empty
// document yields an empty map.
using TfIdfVector = std::map<std::string, double>;

// TF-IDF vectors for a document pair. TF is the raw term count within the
// document; IDF is computed over the two-document corpus with smoothing
// idf(t) = ln((1 + N) / (1 + df(t))) + 1, N = 2.
std::pair<TfIdfVector, TfIdfVector> tfidf_pair(const std::vector<std::string>& q_tokens,
                                               const std::vector<std::string>& r_tokens);

// Cosine of the two TF-IDF vectors, in [0,1]. Zero when either side has
// zero norm.
double cosine(const TfIdfVector& a, const TfIdfVector& b);

double similarity(std::string_view q, std::string_view r);

// Gate one rewrite candidate. Acceptance is inclusive: similarity >= threshold.
Rewrite gate(const Question& q, const std::string& candidate, double threshold = 0.6);

}  // namespace apf
