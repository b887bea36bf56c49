#include <catch2/catch_amalgamated.hpp>

#include "ckdiag/rng.hpp"
#include "ckdiag/rouge.hpp"

using namespace ckdiag;

TEST_CASE("rouge-1 on the worked example") {
    const RougeScore s = rouge_1("the cat", "the cat sat");
    CHECK(s.precision == Catch::Approx(1.0).margin(1e-9));
    CHECK(s.recall == Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK(s.f1 == Catch::Approx(0.8).margin(1e-9));
}

TEST_CASE("identical texts score 1 under both variants") {
    const std::string text = "replica lag caused stale reads for premium tenants";
    for (const RougeScore& s : {rouge_1(text, text), rouge_l(text, text)}) {
        CHECK(s.precision == Catch::Approx(1.0).margin(1e-12));
        CHECK(s.recall == Catch::Approx(1.0).margin(1e-12));
        CHECK(s.f1 == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("disjoint vocabularies score zero") {
    CHECK(rouge_1("alpha beta", "gamma delta").f1 == 0.0);
    CHECK(rouge_l("alpha beta", "gamma delta").f1 == 0.0);
}

TEST_CASE("rouge-1 matching is clipped to multiset counts") {
    const RougeScore s = rouge_1("a a a", "a b");
    CHECK(s.precision == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(s.recall == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("tokenization lowercases and strips punctuation") {
    const RougeScore s = rouge_1("The CAT!", "the cat");
    CHECK(s.f1 == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rouge-l on the worked lcs example") {
    // LCS("a b c d e", "a c e") = 3
    const RougeScore s = rouge_l("a b c d e", "a c e");
    CHECK(s.recall == Catch::Approx(1.0).margin(1e-12));
    CHECK(s.precision == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("reversing distinct tokens leaves an lcs of one") {
    const RougeScore s = rouge_l("a b c d", "d c b a");
    CHECK(s.precision == Catch::Approx(0.25).margin(1e-12));
    CHECK(s.recall == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("empty inputs give all-zero scores") {
    for (const RougeScore& s : {rouge_1("", ""), rouge_l("", ""), rouge_1("a", ""),
                                rouge_l("", "a")}) {
        CHECK(s.precision == 0.0);
        CHECK(s.recall == 0.0);
        CHECK(s.f1 == 0.0);
    }
}

TEST_CASE("swapping arguments swaps precision and recall") {
    Rng rng(55);
    auto random_text = [&rng] {
        std::string out;
        const std::size_t words = 1 + rng.next_below(12);
        for (std::size_t w = 0; w < words; ++w) {
            out += "tok" + std::to_string(rng.next_below(8)) + " ";
        }
        return out;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const std::string a = random_text(), b = random_text();
        const RougeScore ab1 = rouge_1(a, b), ba1 = rouge_1(b, a);
        CHECK(ab1.precision == Catch::Approx(ba1.recall).margin(1e-12));
        CHECK(ab1.recall == Catch::Approx(ba1.precision).margin(1e-12));
        const RougeScore abL = rouge_l(a, b), baL = rouge_l(b, a);
        CHECK(abL.precision == Catch::Approx(baL.recall).margin(1e-12));
        CHECK(abL.recall == Catch::Approx(baL.precision).margin(1e-12));
        // the LCS match count never exceeds the unigram overlap count
        CHECK(abL.recall <= ab1.recall + 1e-12);
    }
}
