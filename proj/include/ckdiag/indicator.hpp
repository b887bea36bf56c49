#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ckdiag/alerts.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/rng.hpp"
#include "ckdiag/time.hpp"

namespace ckdiag {

// Binary (time window x unique alert) occurrence matrix. Rows are half-open
// windows [start, start + t); cell = 1 iff the alert fired at least once in
// the window.
struct IndicatorMatrix {
    std::vector<Timestamp> window_start_times;
    std::vector<std::string> alert_ids;   // column order
    std::vector<std::uint8_t> cells;      // row-major, rows() x cols()
    std::int64_t window_duration = 0;     // minutes

    std::size_t rows() const { return window_start_times.size(); }
    std::size_t cols() const { return alert_ids.size(); }

    std::uint8_t at(std::size_t r, std::size_t c) const { return cells[r * cols() + c]; }
    std::uint8_t& at(std::size_t r, std::size_t c) { return cells[r * cols() + c]; }

    std::size_t column_fires(std::size_t c) const {
        std::size_t n = 0;
        for (std::size_t r = 0; r < rows(); ++r) n += at(r, c);
        return n;
    }

    bool row_all_zero(std::size_t r) const {
        for (std::size_t c = 0; c < cols(); ++c) {
            if (at(r, c)) return false;
        }
        return true;
    }
};

// Bins alerts into t-minute windows covering [period.start, period.end).
// Window i starts at period.start + i*t; a firing lands in the window whose
// half-open span contains it. Firings outside the period are ignored.
inline IndicatorMatrix build_indicator_matrix(const AlertLog& log, std::int64_t t_minutes,
                                              TimeRange period,
                                              std::vector<std::string>* warnings = nullptr) {
    if (t_minutes <= 0) throw InvalidArgument("window duration must be positive");
    if (period.empty()) throw InvalidArgument("period must be non-empty");
    const Seconds t = minutes(t_minutes);
    if (period.end - period.start < t) {
        throw InvalidArgument("period is shorter than one window");
    }
    IndicatorMatrix m;
    m.window_duration = t_minutes;
    const std::size_t n_windows =
        static_cast<std::size_t>((period.end - period.start + t - 1) / t);
    m.window_start_times.reserve(n_windows);
    for (std::size_t i = 0; i < n_windows; ++i) {
        m.window_start_times.push_back(period.start + static_cast<Seconds>(i) * t);
    }
    m.alert_ids = log.unique_alert_ids();
    m.cells.assign(n_windows * m.alert_ids.size(), 0);
    if (log.empty()) {
        if (warnings) warnings->push_back("empty alert log: indicator matrix is all-zero");
        return m;
    }
    for (const auto& a : log.alerts) {
        if (!period.contains(a.fired_at)) continue;
        const std::size_t row = static_cast<std::size_t>((a.fired_at - period.start) / t);
        const auto it = std::lower_bound(m.alert_ids.begin(), m.alert_ids.end(), a.alert_id);
        const std::size_t col = static_cast<std::size_t>(it - m.alert_ids.begin());
        m.at(row, col) = 1;
    }
    return m;
}

// Ids of alerts with at least one firing in [start - pre_window, resolution].
inline std::set<std::string> alerts_in_outage_window(const AlertLog& log, const OutageReport& o,
                                                     Seconds pre_window = hours(1)) {
    std::set<std::string> ids;
    const Timestamp lo = o.start_time - pre_window;
    for (const auto& a : log.alerts) {
        if (a.fired_at >= lo && a.fired_at <= o.resolution_time) ids.insert(a.alert_id);
    }
    return ids;
}

// Drops low-signal columns: an alert column is removed iff it fired in fewer
// than `min_fires` windows AND no window in which it fired overlaps any
// outage's [start - pre_window, resolution] span. Survivor order is kept.
inline IndicatorMatrix filter_columns(const IndicatorMatrix& m,
                                      const std::vector<OutageReport>& outages,
                                      std::size_t min_fires = 10,
                                      Seconds pre_window = hours(1)) {
    if (min_fires < 1) throw InvalidArgument("min_fires must be >= 1");
    const Seconds t = minutes(m.window_duration);
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (m.column_fires(c) >= min_fires) {
            keep.push_back(c);
            continue;
        }
        bool fired_in_outage = false;
        for (std::size_t r = 0; r < m.rows() && !fired_in_outage; ++r) {
            if (!m.at(r, c)) continue;
            const Timestamp w = m.window_start_times[r];
            for (const auto& o : outages) {
                if (w <= o.resolution_time && o.start_time - pre_window < w + t) {
                    fired_in_outage = true;
                    break;
                }
            }
        }
        if (fired_in_outage) keep.push_back(c);
    }
    IndicatorMatrix out;
    out.window_duration = m.window_duration;
    out.window_start_times = m.window_start_times;
    for (std::size_t c : keep) out.alert_ids.push_back(m.alert_ids[c]);
    out.cells.assign(out.rows() * out.cols(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t i = 0; i < keep.size(); ++i) out.at(r, i) = m.at(r, keep[i]);
    }
    return out;
}

// Subsamples all-zero rows: keeps floor(n_zero * (1 - drop_fraction)) of
// them, chosen uniformly by the seeded RNG. Rows with any firing are always
// kept; chronological order is preserved.
inline IndicatorMatrix filter_rows(const IndicatorMatrix& m, double drop_fraction,
                                   std::uint64_t seed) {
    if (drop_fraction < 0.0 || drop_fraction >= 1.0) {
        throw InvalidArgument("drop_fraction must be in [0, 1)");
    }
    std::vector<std::size_t> zero_rows;
    std::vector<bool> keep(m.rows(), true);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (m.row_all_zero(r)) {
            zero_rows.push_back(r);
            keep[r] = false;
        }
    }
    const std::size_t n_keep = static_cast<std::size_t>(
        std::floor(static_cast<double>(zero_rows.size()) * (1.0 - drop_fraction)));
    Rng rng(seed);
    for (std::size_t idx : rng.sample_without_replacement(zero_rows.size(), n_keep)) {
        keep[zero_rows[idx]] = true;
    }
    IndicatorMatrix out;
    out.window_duration = m.window_duration;
    out.alert_ids = m.alert_ids;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (!keep[r]) continue;
        out.window_start_times.push_back(m.window_start_times[r]);
        for (std::size_t c = 0; c < m.cols(); ++c) out.cells.push_back(m.at(r, c));
    }
    return out;
}

}  // namespace ckdiag
