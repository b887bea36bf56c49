#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ckdiag/alerts.hpp"
#include "ckdiag/indicator.hpp"
#include "ckdiag/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace ckdiag;

namespace {

AlertLog random_log(std::uint64_t seed, std::size_t n, Timestamp start, Seconds span) {
    Rng rng(seed);
    AlertLog log;
    const std::vector<std::string> ids = {"disk_full", "cpu_high", "latency", "errors_5xx"};
    for (std::size_t i = 0; i < n; ++i) {
        Alert a;
        a.alert_id = ids[rng.next_below(ids.size())];
        a.title = a.alert_id;
        a.fired_at = start + static_cast<Seconds>(rng.next_below(static_cast<std::uint64_t>(span)));
        log.alerts.push_back(std::move(a));
    }
    log.sort();
    return log;
}

bool matrices_equal(const IndicatorMatrix& a, const IndicatorMatrix& b) {
    return a.window_start_times == b.window_start_times && a.alert_ids == b.alert_ids &&
           a.cells == b.cells;
}

}  // namespace

TEST_CASE("parse_alerts sorts records chronologically") {
    std::stringstream in;
    in << R"({"alert_id":"a","title":"","service":"s","severity":"info","fired_at":"2024-01-01T02:00:00Z"})" << "\n"
       << R"({"alert_id":"b","title":"","service":"s","severity":"info","fired_at":"2024-01-01T00:00:00Z"})" << "\n"
       << R"({"alert_id":"c","title":"","service":"s","severity":"info","fired_at":"2024-01-01T01:00:00Z"})" << "\n";
    const AlertLog log = parse_alerts(in);
    REQUIRE(log.size() == 3);
    CHECK(log.alerts[0].alert_id == "b");
    CHECK(log.alerts[1].alert_id == "c");
    CHECK(log.alerts[2].alert_id == "a");
}

TEST_CASE("parse_alerts reports malformed records with line numbers") {
    std::stringstream in;
    in << R"({"alert_id":"a","fired_at":"2024-01-01T02:00:00Z"})" << "\n"
       << R"({"alert_id":"b"})" << "\n";
    try {
        parse_alerts(in);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("fired_at") != std::string::npos);
    }
}

TEST_CASE("parse_alerts rejects empty input") {
    std::stringstream in("");
    CHECK_THROWS_AS(parse_alerts(in), FormatError);
}

TEST_CASE("large synthetic log parses with count preserved") {
    std::stringstream in;
    Rng rng(99);
    const std::size_t n = 44000;
    for (std::size_t i = 0; i < n; ++i) {
        const Timestamp t = 1700000000 + static_cast<Timestamp>(rng.next_below(86400 * 30));
        in << R"({"alert_id":"alert_)" << rng.next_below(40) << R"(","title":"t","service":"s",)"
           << R"("severity":"warning","fired_at":")" << format_rfc3339(t) << R"("})" << "\n";
    }
    const AlertLog log = parse_alerts(in);
    CHECK(log.size() == n);
    for (std::size_t i = 1; i < log.size(); ++i) {
        CHECK(log.alerts[i - 1].fired_at <= log.alerts[i].fired_at);
    }
}

TEST_CASE("alert log round-trips through its wire format") {
    const AlertLog log = random_log(5, 200, parse_rfc3339("2024-01-01T00:00:00Z"), hours(48));
    std::stringstream buf;
    write_alerts(buf, log);
    const AlertLog back = parse_alerts(buf);
    REQUIRE(back.size() == log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(back.alerts[i].alert_id == log.alerts[i].alert_id);
        CHECK(back.alerts[i].fired_at == log.alerts[i].fired_at);
    }
}

TEST_CASE("indicator window assignment floors to the window start") {
    AlertLog log;
    log.alerts = {fixtures::alert("a", "2024-01-01T10:07:00Z")};
    const TimeRange period{parse_rfc3339("2024-01-01T10:00:00Z"),
                           parse_rfc3339("2024-01-01T10:30:00Z")};
    const IndicatorMatrix m = build_indicator_matrix(log, 15, period);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 1);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(1, 0) == 0);
}

TEST_CASE("two firings in one window still give an indicator of 1") {
    AlertLog log;
    log.alerts = {fixtures::alert("a", "2024-01-01T10:02:00Z"),
                  fixtures::alert("a", "2024-01-01T10:11:00Z")};
    const TimeRange period{parse_rfc3339("2024-01-01T10:00:00Z"),
                           parse_rfc3339("2024-01-01T10:15:00Z")};
    const IndicatorMatrix m = build_indicator_matrix(log, 15, period);
    REQUIRE(m.rows() == 1);
    CHECK(m.at(0, 0) == 1);
}

TEST_CASE("indicator matrix equals the naive per-window scan") {
    const Timestamp start = parse_rfc3339("2024-01-01T00:00:00Z");
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const AlertLog log = random_log(seed, 500, start, hours(50));
        const TimeRange period{start, start + hours(50)};
        const IndicatorMatrix fast = build_indicator_matrix(log, 15, period);
        const IndicatorMatrix slow = oracles::naive_indicator(log, 15, period);
        CHECK(matrices_equal(fast, slow));
        // idempotent: same inputs, same matrix
        CHECK(matrices_equal(fast, build_indicator_matrix(log, 15, period)));
    }
}

TEST_CASE("empty log yields an all-zero matrix with a warning") {
    AlertLog log;
    std::vector<std::string> warnings;
    const TimeRange period{0, minutes(60)};
    const IndicatorMatrix m = build_indicator_matrix(log, 15, period, &warnings);
    CHECK(m.rows() == 4);
    CHECK(m.cols() == 0);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("period shorter than one window is rejected") {
    AlertLog log;
    log.alerts = {fixtures::alert("a", "2024-01-01T10:02:00Z")};
    CHECK_THROWS_AS(
        build_indicator_matrix(log, 15, {parse_rfc3339("2024-01-01T10:00:00Z"),
                                         parse_rfc3339("2024-01-01T10:10:00Z")}),
        InvalidArgument);
}

TEST_CASE("column filter drops rare alerts unless they fired during an outage") {
    // "rare" fired 3 times outside any outage; "rare_outage" fired 3 times,
    // once inside the outage pre-window; "common" fired 12 times.
    AlertLog log;
    const Timestamp start = parse_rfc3339("2024-01-01T00:00:00Z");
    for (int i = 0; i < 3; ++i) {
        Alert a = fixtures::alert("rare", "2024-01-01T00:00:00Z");
        a.fired_at = start + hours(i);
        log.alerts.push_back(a);
    }
    for (int i = 0; i < 3; ++i) {
        Alert a = fixtures::alert("rare_outage", "2024-01-01T00:00:00Z");
        a.fired_at = start + hours(40 + i * 20);
        log.alerts.push_back(a);
    }
    for (int i = 0; i < 12; ++i) {
        Alert a = fixtures::alert("common", "2024-01-01T00:00:00Z");
        a.fired_at = start + hours(2 * i);
        log.alerts.push_back(a);
    }
    log.sort();
    const std::vector<OutageReport> outages = {
        fixtures::report("O1", "2024-01-02T16:30:00Z", "2024-01-02T18:00:00Z", "s", "rc", "rem")};
    // rare_outage's firing at start+40h = Jan 2, 16:00 falls in [start-1h, resolution]
    const IndicatorMatrix m =
        build_indicator_matrix(log, 15, {start, start + hours(90)});
    const IndicatorMatrix filtered = filter_columns(m, outages, 10);
    CHECK(filtered.alert_ids == std::vector<std::string>{"common", "rare_outage"});
}

TEST_CASE("column filter survivor count matches a direct recount") {
    const Timestamp start = parse_rfc3339("2024-01-01T00:00:00Z");
    const AlertLog log = random_log(17, 300, start, hours(100));
    const std::vector<OutageReport> outages = {
        fixtures::report("O1", "2024-01-02T00:00:00Z", "2024-01-02T02:00:00Z", "s", "rc", "rem")};
    const IndicatorMatrix m = build_indicator_matrix(log, 15, {start, start + hours(100)});
    const IndicatorMatrix filtered = filter_columns(m, outages, 30);

    // oracle: recount fires per column and overlap per window, from scratch
    std::vector<std::string> expected;
    const Seconds t = minutes(15);
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::size_t fires = 0;
        bool in_outage = false;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (!m.at(r, c)) continue;
            ++fires;
            for (const auto& o : outages) {
                const Timestamp lo = o.start_time - hours(1);
                if (m.window_start_times[r] + t > lo &&
                    m.window_start_times[r] <= o.resolution_time) {
                    in_outage = true;
                }
            }
        }
        if (fires >= 30 || in_outage) expected.push_back(m.alert_ids[c]);
    }
    CHECK(filtered.alert_ids == expected);
}

TEST_CASE("row filter keeps every firing row and floor(share) of zero rows") {
    IndicatorMatrix m;
    m.window_duration = 15;
    m.alert_ids = {"a"};
    for (std::size_t r = 0; r < 1100; ++r) {
        m.window_start_times.push_back(static_cast<Timestamp>(r) * 900);
        m.cells.push_back(r < 100 ? 1 : 0);  // 100 firing rows, 1000 all-zero rows
    }
    const IndicatorMatrix out = filter_rows(m, 0.95, 7);
    CHECK(out.rows() == 100 + 50);
    std::size_t firing = 0;
    for (std::size_t r = 0; r < out.rows(); ++r) firing += out.at(r, 0);
    CHECK(firing == 100);

    // deterministic for a fixed seed
    const IndicatorMatrix again = filter_rows(m, 0.95, 7);
    CHECK(matrices_equal(out, again));
    // chronological order preserved
    for (std::size_t r = 1; r < out.rows(); ++r) {
        CHECK(out.window_start_times[r - 1] < out.window_start_times[r]);
    }
}

TEST_CASE("row filter is a no-op without all-zero rows") {
    IndicatorMatrix m;
    m.window_duration = 15;
    m.alert_ids = {"a"};
    for (std::size_t r = 0; r < 20; ++r) {
        m.window_start_times.push_back(static_cast<Timestamp>(r) * 900);
        m.cells.push_back(1);
    }
    CHECK(matrices_equal(filter_rows(m, 0.95, 3), m));
}

TEST_CASE("outage window alert scan matches brute force and boundary rules") {
    const OutageReport o =
        fixtures::report("O1", "2024-01-01T12:00:00Z", "2024-01-01T13:00:00Z", "s", "rc", "rem");
    AlertLog log;
    log.alerts = {fixtures::alert("before_30m", "2024-01-01T11:30:00Z"),
                  fixtures::alert("before_2h", "2024-01-01T10:00:00Z"),
                  fixtures::alert("during", "2024-01-01T12:30:00Z"),
                  fixtures::alert("at_resolution", "2024-01-01T13:00:00Z"),
                  fixtures::alert("after", "2024-01-01T13:00:01Z")};
    log.sort();
    const auto ids = alerts_in_outage_window(log, o);
    CHECK(ids.count("before_30m") == 1);
    CHECK(ids.count("before_2h") == 0);
    CHECK(ids.count("during") == 1);
    CHECK(ids.count("at_resolution") == 1);
    CHECK(ids.count("after") == 0);

    const Timestamp start = parse_rfc3339("2024-01-01T00:00:00Z");
    for (std::uint64_t seed : {4u, 5u}) {
        const AlertLog rand_log = random_log(seed, 400, start, hours(30));
        CHECK(alerts_in_outage_window(rand_log, o) ==
              oracles::interval_scan(rand_log, o.start_time - hours(1), o.resolution_time));
    }
}

TEST_CASE("outage window scan is monotone in the interval") {
    const Timestamp start = parse_rfc3339("2024-01-01T00:00:00Z");
    const AlertLog log = random_log(21, 300, start, hours(30));
    const OutageReport full =
        fixtures::report("O1", "2024-01-01T05:00:00Z", "2024-01-01T20:00:00Z", "s", "rc", "rem");
    const OutageReport sub =
        fixtures::report("O1", "2024-01-01T08:00:00Z", "2024-01-01T12:00:00Z", "s", "rc", "rem");
    const auto big = alerts_in_outage_window(log, full);
    for (const auto& id : alerts_in_outage_window(log, sub)) CHECK(big.count(id) == 1);
}

TEST_CASE("outage report parsing validates invariants") {
    std::stringstream in(R"([{"outage_id":"O1","start_time":"2024-01-01T12:00:00Z",
        "resolution_time":"2024-01-01T11:00:00Z","symptom":"s","root_cause":"r","remediation":"m"}])");
    CHECK_THROWS_AS(parse_reports(in), FormatError);

    std::stringstream ok(R"([{"outage_id":"O1","start_time":"2024-01-01T10:00:00Z",
        "resolution_time":"2024-01-01T11:00:00Z","symptom":"s","root_cause":"r","remediation":"m"}])");
    const auto reports = parse_reports(ok);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].outage_id == "O1");
}
