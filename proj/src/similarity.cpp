#include "apf/similarity.hpp"

#include <cmath>

#include "apf/errors.hpp"
#include "apf/text.hpp"

namespace apf {

namespace {

std::map<std::string, std::size_t> term_counts(const std::vector<std::string>& tokens) {
    std::map<std::string, std::size_t> counts;
    for (const std::string& t : tokens) ++counts[t];
    return counts;
}

}  // namespace

std::pair<TfIdfVector, TfIdfVector> tfidf_pair(const std::vector<std::string>& q_tokens,
                                               const std::vector<std::string>& r_tokens) {
    const auto q_tf = term_counts(q_tokens);
    const auto r_tf = term_counts(r_tokens);

    auto idf = [&](const std::string& term) {
        std::size_t df = 0;
        if (q_tf.count(term)) ++df;
        if (r_tf.count(term)) ++df;
        return std::log(3.0 / (1.0 + static_cast<double>(df))) + 1.0;
    };

    TfIdfVector vq;
    TfIdfVector vr;
    for (const auto& [term, count] : q_tf) vq[term] = static_cast<double>(count) * idf(term);
    for (const auto& [term, count] : r_tf) vr[term] = static_cast<double>(count) * idf(term);
    return {std::move(vq), std::move(vr)};
}

double cosine(const TfIdfVector& a, const TfIdfVector& b) {
    double dot = 0.0;
    for (const auto& [term, weight] : a) {
        auto it = b.find(term);
        if (it != b.end()) dot += weight * it->second;
    }
    double sumsq_a = 0.0;
    double sumsq_b = 0.0;
    for (const auto& [term, weight] : a) sumsq_a += weight * weight;
    for (const auto& [term, weight] : b) sumsq_b += weight * weight;
    if (sumsq_a == 0.0 || sumsq_b == 0.0) return 0.0;
    // Single sqrt over the product keeps exact ratios (e.g. 6/sqrt(100))
    // bit-stable, which the inclusive threshold comparison relies on.
    return dot / std::sqrt(sumsq_a * sumsq_b);
}

double similarity(std::string_view q, std::string_view r) {
    auto [vq, vr] = tfidf_pair(text::tokenize(q), text::tokenize(r));
    return cosine(vq, vr);
}

Rewrite gate(const Question& q, const std::string& candidate, double threshold) {
    if (threshold < 0.0 || threshold > 1.0) {
        throw PreconditionError("similarity threshold must be within [0,1]");
    }
    Rewrite rewrite;
    rewrite.source_id = q.id;
    rewrite.text = candidate;
    rewrite.similarity = similarity(q.text, candidate);
    rewrite.accepted = rewrite.similarity >= threshold;
    return rewrite;
}

}  // namespace apf
