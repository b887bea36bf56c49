#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/error.hpp"
#include "ckdiag/time.hpp"

namespace ckdiag {

enum class Severity { info, warning, critical };

inline std::string to_string(Severity s) {
    switch (s) {
        case Severity::info: return "info";
        case Severity::warning: return "warning";
        case Severity::critical: return "critical";
    }
    return "info";
}

inline Severity severity_from_string(const std::string& s) {
    if (s == "info") return Severity::info;
    if (s == "warning") return Severity::warning;
    if (s == "critical") return Severity::critical;
    throw FormatError("unknown severity '" + s + "'");
}

// One firing of an alert definition. `alert_id` names the definition; the
// same id recurs across firings.
struct Alert {
    std::string alert_id;
    std::string title;
    std::string service;
    Severity severity = Severity::info;
    Timestamp fired_at = 0;
    std::string description;  // optional
};

// Chronologically sorted alert firings.
struct AlertLog {
    std::vector<Alert> alerts;

    bool empty() const { return alerts.empty(); }
    std::size_t size() const { return alerts.size(); }

    void sort() {
        std::stable_sort(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
            if (a.fired_at != b.fired_at) return a.fired_at < b.fired_at;
            return a.alert_id < b.alert_id;
        });
    }

    // [min fired_at, max fired_at + 1): smallest range covering every firing.
    TimeRange span() const {
        if (alerts.empty()) return {};
        return {alerts.front().fired_at, alerts.back().fired_at + 1};
    }

    // Distinct alert ids, lexicographically sorted.
    std::vector<std::string> unique_alert_ids() const {
        std::vector<std::string> ids;
        for (const auto& a : alerts) ids.push_back(a.alert_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }

    // First-seen title per alert id; alert ids without a title fall back to
    // the id itself. Used so inference queries can be made from ids alone.
    std::map<std::string, std::string> titles_by_id() const {
        std::map<std::string, std::string> out;
        for (const auto& a : alerts) {
            auto it = out.find(a.alert_id);
            if (it == out.end()) out.emplace(a.alert_id, a.title.empty() ? a.alert_id : a.title);
        }
        return out;
    }
};

// Post-mortem document for one outage.
struct OutageReport {
    std::string outage_id;
    Timestamp start_time = 0;
    Timestamp resolution_time = 0;
    std::string symptom_text;
    std::string root_cause_text;
    std::string remediation_text;
    std::vector<std::string> affected_services;  // optional

    void validate() const {
        if (outage_id.empty()) throw FormatError("outage report with empty outage_id");
        if (start_time >= resolution_time) {
            throw FormatError("outage '" + outage_id + "': start_time must precede resolution_time");
        }
        if (symptom_text.empty() || root_cause_text.empty() || remediation_text.empty()) {
            throw FormatError("outage '" + outage_id +
                              "': symptom, root_cause and remediation must all be non-empty");
        }
    }
};

namespace detail {

inline Alert alert_from_json(const nlohmann::json& j) {
    Alert a;
    if (!j.contains("alert_id") || !j["alert_id"].is_string() || j["alert_id"].empty()) {
        throw FormatError("missing or empty 'alert_id'");
    }
    a.alert_id = j["alert_id"].get<std::string>();
    if (!j.contains("fired_at")) throw FormatError("missing 'fired_at'");
    a.fired_at = parse_rfc3339(j["fired_at"].get<std::string>());
    a.title = j.value("title", std::string{});
    a.service = j.value("service", std::string{});
    a.severity = severity_from_string(j.value("severity", std::string{"info"}));
    a.description = j.value("description", std::string{});
    return a;
}

inline nlohmann::json alert_to_json(const Alert& a) {
    nlohmann::json j = {{"alert_id", a.alert_id},
                        {"title", a.title},
                        {"service", a.service},
                        {"severity", to_string(a.severity)},
                        {"fired_at", format_rfc3339(a.fired_at)}};
    if (!a.description.empty()) j["description"] = a.description;
    return j;
}

inline OutageReport report_from_json(const nlohmann::json& j) {
    OutageReport r;
    for (const char* key : {"outage_id", "start_time", "resolution_time", "symptom",
                            "root_cause", "remediation"}) {
        if (!j.contains(key)) throw FormatError(std::string("outage report missing '") + key + "'");
    }
    r.outage_id = j["outage_id"].get<std::string>();
    r.start_time = parse_rfc3339(j["start_time"].get<std::string>());
    r.resolution_time = parse_rfc3339(j["resolution_time"].get<std::string>());
    r.symptom_text = j["symptom"].get<std::string>();
    r.root_cause_text = j["root_cause"].get<std::string>();
    r.remediation_text = j["remediation"].get<std::string>();
    if (j.contains("affected_services")) {
        r.affected_services = j["affected_services"].get<std::vector<std::string>>();
    }
    r.validate();
    return r;
}

inline nlohmann::json report_to_json(const OutageReport& r) {
    nlohmann::json j = {{"outage_id", r.outage_id},
                        {"start_time", format_rfc3339(r.start_time)},
                        {"resolution_time", format_rfc3339(r.resolution_time)},
                        {"symptom", r.symptom_text},
                        {"root_cause", r.root_cause_text},
                        {"remediation", r.remediation_text}};
    if (!r.affected_services.empty()) j["affected_services"] = r.affected_services;
    return j;
}

}  // namespace detail

// Parses a newline-delimited JSON alert log. Every malformed line is
// collected and reported with its 1-based line number in a single
// FormatError. Blank lines are skipped. Empty input is an error.
inline AlertLog parse_alerts(std::istream& in) {
    AlertLog log;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> bad;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            log.alerts.push_back(detail::alert_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            if (bad.size() < 10) bad.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!bad.empty()) {
        std::string msg = "malformed alert records:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw FormatError(msg);
    }
    if (log.empty()) throw FormatError("alert log is empty");
    log.sort();
    return log;
}

inline void write_alerts(std::ostream& out, const AlertLog& log) {
    for (const auto& a : log.alerts) out << detail::alert_to_json(a).dump() << '\n';
}

// Parses outage reports: either a JSON array of report documents or a single
// document. Reports are returned sorted by outage_id.
inline std::vector<OutageReport> parse_reports(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError(std::string("unparseable outage report document: ") + e.what());
    }
    std::vector<OutageReport> reports;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            try {
                reports.push_back(detail::report_from_json(j[i]));
            } catch (const FormatError& e) {
                throw FormatError("report at index " + std::to_string(i) + ": " + e.what());
            }
        }
    } else if (j.is_object()) {
        reports.push_back(detail::report_from_json(j));
    } else {
        throw FormatError("outage report document must be an object or array");
    }
    std::sort(reports.begin(), reports.end(),
              [](const OutageReport& a, const OutageReport& b) { return a.outage_id < b.outage_id; });
    return reports;
}

inline void write_reports(std::ostream& out, const std::vector<OutageReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(detail::report_to_json(r));
    out << arr.dump(2) << '\n';
}

}  // namespace ckdiag
