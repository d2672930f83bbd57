#include "doctest.h"

#include <cmath>
#include <random>

#include "apf/similarity.hpp"
#include "apf/text.hpp"

using namespace apf;

namespace {

// Independent dense oracle: explicit vocabulary vector, textbook cosine.
// Shares nothing with the sparse implementation beyond the tokenizer.
double dense_cosine_oracle(const std::string& q, const std::string& r) {
    auto q_tokens = text::tokenize(q);
    auto r_tokens = text::tokenize(r);

    std::vector<std::string> vocab;
    for (const auto& t : q_tokens) {
        if (std::find(vocab.begin(), vocab.end(), t) == vocab.end()) vocab.push_back(t);
    }
    for (const auto& t : r_tokens) {
        if (std::find(vocab.begin(), vocab.end(), t) == vocab.end()) vocab.push_back(t);
    }

    std::vector<double> vq(vocab.size(), 0.0);
    std::vector<double> vr(vocab.size(), 0.0);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        double tf_q = std::count(q_tokens.begin(), q_tokens.end(), vocab[i]);
        double tf_r = std::count(r_tokens.begin(), r_tokens.end(), vocab[i]);
        double df = (tf_q > 0 ? 1 : 0) + (tf_r > 0 ? 1 : 0);
        double idf = std::log(3.0 / (1.0 + df)) + 1.0;
        vq[i] = tf_q * idf;
        vr[i] = tf_r * idf;
    }

    double dot = 0, nq = 0, nr = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        dot += vq[i] * vr[i];
        nq += vq[i] * vq[i];
        nr += vr[i] * vr[i];
    }
    if (nq == 0 || nr == 0) return 0.0;
    return dot / (std::sqrt(nq) * std::sqrt(nr));
}

std::string random_doc(std::mt19937_64& rng, int max_len, int alphabet) {
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_int_distribution<int> term_dist(0, alphabet - 1);
    std::string doc;
    int len = len_dist(rng);
    for (int i = 0; i < len; ++i) {
        if (i) doc.push_back(' ');
        doc.push_back(static_cast<char>('a' + term_dist(rng)));
    }
    return doc;
}

}  // namespace

TEST_CASE("idf values match the hand-computed two-document corpus") {
    // q="a b", r="a c": df(a)=2 -> idf=ln(3/3)+1=1; df(b)=df(c)=1 -> ln(3/2)+1
    auto [vq, vr] = tfidf_pair(text::tokenize("a b"), text::tokenize("a c"));
    const double idf_rare = std::log(1.5) + 1.0;  // 1.4054651081081644
    CHECK(vq.at("a") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vq.at("b") == doctest::Approx(idf_rare).epsilon(1e-12));
    CHECK(vr.at("a") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vr.at("c") == doctest::Approx(idf_rare).epsilon(1e-12));
    CHECK(idf_rare == doctest::Approx(1.4054651081081644).epsilon(1e-15));
}

TEST_CASE("identical documents produce identical vectors") {
    auto [vq, vr] = tfidf_pair(text::tokenize("x y x"), text::tokenize("x y x"));
    CHECK(vq == vr);
}

TEST_CASE("empty document gives an empty vector and zero similarity") {
    auto [vq, vr] = tfidf_pair(text::tokenize("a b"), text::tokenize(""));
    CHECK(vr.empty());
    CHECK(similarity("a b", "") == 0.0);
    CHECK(similarity("", "") == 0.0);
}

TEST_CASE("similarity of a document with itself is 1") {
    for (const char* doc : {"x", "hello world", "a a b c c c", "one two three four"}) {
        CHECK(std::abs(similarity(doc, doc) - 1.0) < 1e-9);
    }
}

TEST_CASE("disjoint vocabularies give exactly zero") {
    CHECK(similarity("a b c", "d e f") == 0.0);
}

TEST_CASE("sparse similarity matches the dense oracle on the derived example") {
    const double oracle = dense_cosine_oracle("a b", "a c");
    CHECK(std::abs(similarity("a b", "a c") - oracle) < 1e-9);
    // frozen from the oracle
    CHECK(similarity("a b", "a c") == doctest::Approx(0.33609692727625745).epsilon(1e-9));
}

TEST_CASE("sparse matches dense oracle exhaustively on a small alphabet") {
    // all documents of length 0..3 over {a,b,c}
    std::vector<std::string> docs{""};
    for (int len = 1; len <= 3; ++len) {
        int total = 1;
        for (int i = 0; i < len; ++i) total *= 3;
        for (int code = 0; code < total; ++code) {
            int c = code;
            std::string doc;
            for (int i = 0; i < len; ++i) {
                if (i) doc.push_back(' ');
                doc.push_back(static_cast<char>('a' + c % 3));
                c /= 3;
            }
            docs.push_back(doc);
        }
    }
    for (const auto& q : docs) {
        for (const auto& r : docs) {
            CHECK(std::abs(similarity(q, r) - dense_cosine_oracle(q, r)) < 1e-9);
        }
    }
}

TEST_CASE("sparse matches dense oracle on random 8-term documents") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        std::string q = random_doc(rng, 12, 8);
        std::string r = random_doc(rng, 12, 8);
        CHECK(std::abs(similarity(q, r) - dense_cosine_oracle(q, r)) < 1e-9);
    }
}

TEST_CASE("similarity is symmetric") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        std::string q = random_doc(rng, 10, 6);
        std::string r = random_doc(rng, 10, 6);
        CHECK(std::abs(similarity(q, r) - similarity(r, q)) < 1e-9);
    }
}

TEST_CASE("gate threshold is inclusive: exactly 0.6 is accepted") {
    // tf vectors (3,1) and (1,3) over shared terms: cos = 6/sqrt(100) = 0.6 exactly
    Question q{"q1", "a a a b", std::nullopt};
    CHECK(similarity("a a a b", "a b b b") == 0.6);
    Rewrite rewrite = gate(q, "a b b b", 0.6);
    CHECK(rewrite.similarity == 0.6);
    CHECK(rewrite.accepted);
}

TEST_CASE("gate rejects below the threshold") {
    Question q{"q1", "a a a b", std::nullopt};
    Rewrite rewrite = gate(q, "a b b b c", 0.6);  // ~0.548
    CHECK(rewrite.similarity < 0.6);
    CHECK_FALSE(rewrite.accepted);
}

TEST_CASE("gate accepts the identical candidate at any threshold <= 1") {
    Question q{"q1", "repeat me twice", std::nullopt};
    for (double threshold : {0.0, 0.5, 1.0}) {
        CHECK(gate(q, q.text, threshold).accepted);
    }
}

TEST_CASE("gate monotonicity: lowering the threshold never un-accepts") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        Question q{"q", random_doc(rng, 8, 5), std::nullopt};
        std::string candidate = random_doc(rng, 8, 5);
        bool prev_accepted = false;
        for (double threshold : {0.9, 0.6, 0.3, 0.0}) {
            bool accepted = gate(q, candidate, threshold).accepted;
            if (prev_accepted) CHECK(accepted);
            prev_accepted = accepted;
        }
    }
}
