#include <catch2/catch_amalgamated.hpp>

#include "ckdiag/rng.hpp"
#include "ckdiag/time.hpp"

using namespace ckdiag;

TEST_CASE("rfc3339 parse and format round-trip") {
    const std::string s = "2021-03-04T10:07:00Z";
    const Timestamp t = parse_rfc3339(s);
    CHECK(format_rfc3339(t) == s);
    CHECK(parse_rfc3339("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_rfc3339("1970-01-02T00:00:00Z") == 86400);
}

TEST_CASE("rfc3339 offsets and fractional seconds") {
    CHECK(parse_rfc3339("2021-03-04T12:07:00+02:00") == parse_rfc3339("2021-03-04T10:07:00Z"));
    CHECK(parse_rfc3339("2021-03-04T08:07:00-02:00") == parse_rfc3339("2021-03-04T10:07:00Z"));
    CHECK(parse_rfc3339("2021-03-04T10:07:00.250Z") == parse_rfc3339("2021-03-04T10:07:00Z"));
    CHECK_THROWS_AS(parse_rfc3339("not a timestamp"), FormatError);
    CHECK_THROWS_AS(parse_rfc3339("2021-13-04T10:07:00Z"), FormatError);
}

TEST_CASE("rng streams are deterministic") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c(42), d(43);
    bool all_equal = true;
    for (int i = 0; i < 10; ++i) all_equal = all_equal && c.next_u64() == d.next_u64();
    CHECK_FALSE(all_equal);
}

TEST_CASE("bounded sampling stays in range") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) CHECK(rng.next_below(13) < 13);
    CHECK(rng.next_below(1) == 0);
}

TEST_CASE("sample_without_replacement yields distinct indices") {
    Rng rng(11);
    const auto picked = rng.sample_without_replacement(100, 30);
    REQUIRE(picked.size() == 30);
    std::set<std::size_t> unique(picked.begin(), picked.end());
    CHECK(unique.size() == 30);
    for (std::size_t i : picked) CHECK(i < 100);
}

TEST_CASE("bernoulli mean is roughly p") {
    Rng rng(3);
    int hits = 0;
    for (int i = 0; i < 20000; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
    CHECK(std::abs(hits / 20000.0 - 0.3) < 0.02);
}

TEST_CASE("time range overlap semantics") {
    TimeRange r{100, 200};  // [100, 200)
    CHECK(r.contains(100));
    CHECK_FALSE(r.contains(200));
    CHECK(r.overlaps(150, 300));
    CHECK(r.overlaps(0, 100));     // hi is inclusive
    CHECK_FALSE(r.overlaps(200, 300));
    CHECK_FALSE(r.overlaps(0, 99));
}
