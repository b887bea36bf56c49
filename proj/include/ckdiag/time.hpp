#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "ckdiag/error.hpp"

namespace ckdiag {

// Seconds since the Unix epoch, UTC. Second resolution is all the alert
// and outage data carries.
using Timestamp = std::int64_t;
using Seconds = std::int64_t;

constexpr Seconds minutes(std::int64_t m) { return m * 60; }
constexpr Seconds hours(std::int64_t h) { return h * 3600; }

namespace detail {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

}  // namespace detail

// Parses an RFC 3339 timestamp ("2021-03-04T10:07:00Z" or with a numeric
// offset) at second resolution. Fractional seconds are accepted and dropped.
inline Timestamp parse_rfc3339(const std::string& s) {
    int year = 0, mon = 0, day = 0, hh = 0, mm = 0;
    double ss = 0.0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%lf%n", &year, &mon, &day, &hh, &mm, &ss,
                    &consumed) != 6 &&
        std::sscanf(s.c_str(), "%4d-%2d-%2d %2d:%2d:%lf%n", &year, &mon, &day, &hh, &mm, &ss,
                    &consumed) != 6) {
        throw FormatError("not an RFC 3339 timestamp: '" + s + "'");
    }
    Seconds offset = 0;
    const std::string rest = s.substr(static_cast<size_t>(consumed));
    if (rest.empty() || rest == "Z" || rest == "z") {
        // UTC
    } else if ((rest[0] == '+' || rest[0] == '-') && rest.size() >= 3) {
        int oh = 0, om = 0;
        if (std::sscanf(rest.c_str() + 1, "%2d:%2d", &oh, &om) < 1) {
            throw FormatError("bad UTC offset in timestamp: '" + s + "'");
        }
        offset = hours(oh) + minutes(om);
        if (rest[0] == '-') offset = -offset;
    } else {
        throw FormatError("trailing junk in timestamp: '" + s + "'");
    }
    if (mon < 1 || mon > 12 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss >= 61.0) {
        throw FormatError("timestamp field out of range: '" + s + "'");
    }
    const std::int64_t days = detail::days_from_civil(year, static_cast<unsigned>(mon),
                                                      static_cast<unsigned>(day));
    return days * 86400 + hh * 3600 + mm * 60 + static_cast<std::int64_t>(ss) - offset;
}

// Formats a timestamp as "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_rfc3339(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t sod = t % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    std::int64_t y;
    unsigned m, d;
    detail::civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), m, d, static_cast<long long>(sod / 3600),
                  static_cast<long long>((sod % 3600) / 60), static_cast<long long>(sod % 60));
    return buf;
}

// Closed-open interval [start, end).
struct TimeRange {
    Timestamp start = 0;
    Timestamp end = 0;

    bool empty() const { return end <= start; }
    bool contains(Timestamp t) const { return t >= start && t < end; }
    bool overlaps(Timestamp lo, Timestamp hi_inclusive) const {
        return start <= hi_inclusive && lo < end;
    }
};

}  // namespace ckdiag
