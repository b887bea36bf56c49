#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/alerts.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/indicator.hpp"
#include "ckdiag/rng.hpp"
#include "ckdiag/time.hpp"

namespace ckdiag {

struct ScenarioNode {
    std::string id;
    std::string title;      // defaults to "<id> threshold exceeded"
    std::string service;
    double p_root = 0.0;    // spontaneous firing rate per window
};

struct ScenarioEdge {
    std::string parent;
    std::string child;
    double p_edge = 0.0;    // child-given-fired-parent trigger probability
};

struct OutageTemplate {
    std::string symptom;
    std::string root_cause;
    std::string remediation;
    std::vector<std::string> trigger_alerts;
};

// A generative model for desk-scale corpora: a known causal DAG over alerts
// (noisy-OR parent combination) plus outage templates whose trigger alerts
// are injected into their outage windows.
struct ScenarioSpec {
    std::vector<ScenarioNode> nodes;
    std::vector<ScenarioEdge> edges;
    std::vector<OutageTemplate> templates;
    std::size_t n_windows = 1000;
    std::int64_t t_minutes = 15;
    Timestamp start_time = parse_rfc3339("2024-01-01T00:00:00Z");
    std::size_t n_outages = 0;
    std::size_t duplicate_pairs = 0;  // leading templates instantiated twice
    std::int64_t outage_duration_minutes = 30;
    std::uint64_t seed = 0;

    TimeRange period() const {
        return {start_time, start_time + static_cast<Seconds>(n_windows) * minutes(t_minutes)};
    }

    // Nodes in topological order; throws if the DAG has a cycle.
    std::vector<std::size_t> topological_order() const {
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].id] = i;
        std::vector<std::vector<std::size_t>> children(nodes.size());
        std::vector<int> indegree(nodes.size(), 0);
        for (const auto& e : edges) {
            children[index.at(e.parent)].push_back(index.at(e.child));
            ++indegree[index.at(e.child)];
        }
        std::vector<std::size_t> order, queue;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (indegree[i] == 0) queue.push_back(i);
        }
        while (!queue.empty()) {
            const std::size_t n = queue.back();
            queue.pop_back();
            order.push_back(n);
            for (std::size_t c : children[n]) {
                if (--indegree[c] == 0) queue.push_back(c);
            }
        }
        if (order.size() != nodes.size()) throw InvalidArgument("scenario: DAG has a cycle");
        return order;
    }

    void validate() const {
        if (nodes.empty()) throw InvalidArgument("scenario: no nodes");
        if (t_minutes <= 0) throw InvalidArgument("scenario: t_minutes must be positive");
        std::set<std::string> ids;
        for (const auto& n : nodes) {
            if (!ids.insert(n.id).second) throw InvalidArgument("scenario: duplicate node " + n.id);
            if (n.p_root < 0.0 || n.p_root > 1.0) {
                throw InvalidArgument("scenario: p_root out of [0, 1] for " + n.id);
            }
        }
        for (const auto& e : edges) {
            if (!ids.count(e.parent) || !ids.count(e.child)) {
                throw InvalidArgument("scenario: edge references unknown node");
            }
            if (e.p_edge < 0.0 || e.p_edge > 1.0) {
                throw InvalidArgument("scenario: p_edge out of [0, 1]");
            }
        }
        for (const auto& t : templates) {
            if (t.trigger_alerts.empty()) {
                throw InvalidArgument("scenario: template without trigger alerts");
            }
            for (const auto& a : t.trigger_alerts) {
                if (!ids.count(a)) {
                    throw InvalidArgument("scenario: template trigger '" + a + "' is not a node");
                }
            }
        }
        if (n_outages > 0) {
            if (duplicate_pairs * 2 > n_outages) {
                throw InvalidArgument("scenario: more duplicate pairs than outages allow");
            }
            const std::size_t needed = duplicate_pairs + (n_outages - 2 * duplicate_pairs);
            if (templates.size() < needed) {
                throw InvalidArgument("scenario: need " + std::to_string(needed) + " templates");
            }
        }
        topological_order();
    }
};

struct GeneratedStream {
    AlertLog log;
    IndicatorMatrix truth;  // exact indicator of the sampled firings
};

// Samples the alert stream window by window: a node fires with probability
// 1 - (1 - p_root) * prod(1 - p_edge) over its fired parents, one RNG draw
// per node per window, plus one draw for the firing offset.
inline GeneratedStream generate_alert_stream(const ScenarioSpec& spec) {
    spec.validate();
    const auto order = spec.topological_order();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) index[spec.nodes[i].id] = i;
    std::vector<std::vector<std::pair<std::size_t, double>>> parents(spec.nodes.size());
    for (const auto& e : spec.edges) {
        parents[index.at(e.child)].emplace_back(index.at(e.parent), e.p_edge);
    }

    GeneratedStream out;
    out.truth.window_duration = spec.t_minutes;
    for (const auto& n : spec.nodes) out.truth.alert_ids.push_back(n.id);
    std::sort(out.truth.alert_ids.begin(), out.truth.alert_ids.end());
    std::vector<std::size_t> truth_col(spec.nodes.size());
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        truth_col[i] = static_cast<std::size_t>(
            std::lower_bound(out.truth.alert_ids.begin(), out.truth.alert_ids.end(),
                             spec.nodes[i].id) -
            out.truth.alert_ids.begin());
    }
    out.truth.cells.assign(spec.n_windows * spec.nodes.size(), 0);

    Rng rng = Rng(spec.seed).fork(0);
    const Seconds t = minutes(spec.t_minutes);
    std::vector<std::uint8_t> fired(spec.nodes.size());
    for (std::size_t w = 0; w < spec.n_windows; ++w) {
        const Timestamp window_start = spec.start_time + static_cast<Seconds>(w) * t;
        out.truth.window_start_times.push_back(window_start);
        std::fill(fired.begin(), fired.end(), 0);
        for (std::size_t n : order) {
            double p_quiet = 1.0 - spec.nodes[n].p_root;
            for (const auto& [p, p_edge] : parents[n]) {
                if (fired[p]) p_quiet *= 1.0 - p_edge;
            }
            const bool fires = rng.next_double() < 1.0 - p_quiet;
            const Seconds offset = static_cast<Seconds>(rng.next_below(static_cast<std::uint64_t>(t)));
            if (!fires) continue;
            fired[n] = 1;
            out.truth.cells[w * spec.nodes.size() + truth_col[n]] = 1;
            Alert a;
            a.alert_id = spec.nodes[n].id;
            a.title = spec.nodes[n].title.empty() ? spec.nodes[n].id + " threshold exceeded"
                                                  : spec.nodes[n].title;
            a.service = spec.nodes[n].service;
            a.severity = Severity::warning;
            a.fired_at = window_start + offset;
            out.log.alerts.push_back(std::move(a));
        }
    }
    out.log.sort();
    return out;
}

struct GeneratedCorpus {
    std::vector<OutageReport> reports;
    // planted duplicate -> original outage instantiated from the same template
    std::map<std::string, std::string> duplicate_of;
};

// Instantiates outage templates at collision-free windows and injects each
// template's trigger alerts into the outage span, keeping the log sorted.
// The first `duplicate_pairs` templates are instantiated twice at different
// times; the alignment map records twin -> original.
inline GeneratedCorpus generate_outage_corpus(const ScenarioSpec& spec, AlertLog& log) {
    spec.validate();
    if (spec.n_outages == 0) throw InvalidArgument("scenario: n_outages must be >= 1");
    Rng rng = Rng(spec.seed).fork(1);
    const Seconds t = minutes(spec.t_minutes);
    const Seconds duration = minutes(spec.outage_duration_minutes);
    const Seconds guard = hours(1);  // keep the pre-window inside the period

    // template per outage: pair j covers outages 2j and 2j+1
    std::vector<std::size_t> template_of;
    for (std::size_t j = 0; j < spec.duplicate_pairs; ++j) {
        template_of.push_back(j);
        template_of.push_back(j);
    }
    for (std::size_t i = template_of.size(); i < spec.n_outages; ++i) {
        template_of.push_back(spec.duplicate_pairs + (i - 2 * spec.duplicate_pairs));
    }

    const TimeRange period = spec.period();
    const Seconds usable = period.end - period.start - guard - duration;
    if (usable <= 0) throw InvalidArgument("scenario: period too short for outages");

    GeneratedCorpus out;
    std::vector<std::pair<Timestamp, Timestamp>> occupied;  // [start - guard, resolution]
    std::map<std::size_t, std::string> first_of_template;
    for (std::size_t i = 0; i < spec.n_outages; ++i) {
        Timestamp start = 0;
        bool placed = false;
        for (int attempt = 0; attempt < 200; ++attempt) {
            const Seconds offset = static_cast<Seconds>(
                rng.next_below(static_cast<std::uint64_t>(usable / t))) * t;
            start = period.start + guard + offset;
            const Timestamp lo = start - guard, hi = start + duration;
            placed = std::none_of(occupied.begin(), occupied.end(), [&](const auto& span) {
                return lo <= span.second && span.first <= hi;
            });
            if (placed) {
                occupied.emplace_back(lo, hi);
                break;
            }
        }
        if (!placed) throw Error("scenario: could not place outage without collision");

        char id_buf[16];
        std::snprintf(id_buf, sizeof(id_buf), "OUT-%04zu", i + 1);
        const auto& tpl = spec.templates[template_of[i]];
        OutageReport r;
        r.outage_id = id_buf;
        r.start_time = start;
        r.resolution_time = start + duration;
        r.symptom_text = tpl.symptom;
        r.root_cause_text = tpl.root_cause;
        r.remediation_text = tpl.remediation;
        out.reports.push_back(r);

        const auto [it, inserted] = first_of_template.emplace(template_of[i], r.outage_id);
        if (!inserted) out.duplicate_of[r.outage_id] = it->second;

        for (const auto& alert_id : tpl.trigger_alerts) {
            Alert a;
            a.alert_id = alert_id;
            a.title = alert_id + " threshold exceeded";
            for (const auto& n : spec.nodes) {
                if (n.id == alert_id) {
                    if (!n.title.empty()) a.title = n.title;
                    a.service = n.service;
                    break;
                }
            }
            a.severity = Severity::critical;
            a.fired_at = start + static_cast<Seconds>(rng.next_below(
                                     static_cast<std::uint64_t>(duration)));
            log.alerts.push_back(std::move(a));
        }
    }
    log.sort();
    std::sort(out.reports.begin(), out.reports.end(),
              [](const OutageReport& a, const OutageReport& b) { return a.outage_id < b.outage_id; });
    return out;
}

struct SyntheticCorpus {
    AlertLog log;
    IndicatorMatrix truth;
    std::vector<OutageReport> reports;
    std::map<std::string, std::string> duplicate_of;
};

inline SyntheticCorpus generate_corpus(const ScenarioSpec& spec) {
    SyntheticCorpus out;
    GeneratedStream stream = generate_alert_stream(spec);
    out.log = std::move(stream.log);
    out.truth = std::move(stream.truth);
    if (spec.n_outages > 0) {
        GeneratedCorpus corpus = generate_outage_corpus(spec, out.log);
        out.reports = std::move(corpus.reports);
        out.duplicate_of = std::move(corpus.duplicate_of);
    }
    return out;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec spec;
    for (const auto& nj : j.at("nodes")) {
        ScenarioNode n;
        n.id = nj.at("id").get<std::string>();
        n.title = nj.value("title", std::string{});
        n.service = nj.value("service", std::string{});
        n.p_root = nj.value("p_root", 0.0);
        spec.nodes.push_back(std::move(n));
    }
    if (j.contains("edges")) {
        for (const auto& ej : j.at("edges")) {
            spec.edges.push_back({ej.at("parent").get<std::string>(),
                                  ej.at("child").get<std::string>(),
                                  ej.value("p_edge", 0.0)});
        }
    }
    if (j.contains("templates")) {
        for (const auto& tj : j.at("templates")) {
            OutageTemplate t;
            t.symptom = tj.at("symptom").get<std::string>();
            t.root_cause = tj.at("root_cause").get<std::string>();
            t.remediation = tj.at("remediation").get<std::string>();
            t.trigger_alerts = tj.at("trigger_alerts").get<std::vector<std::string>>();
            spec.templates.push_back(std::move(t));
        }
    }
    spec.n_windows = j.value("n_windows", spec.n_windows);
    spec.t_minutes = j.value("t_minutes", spec.t_minutes);
    if (j.contains("start_time")) spec.start_time = parse_rfc3339(j.at("start_time").get<std::string>());
    spec.n_outages = j.value("n_outages", spec.n_outages);
    spec.duplicate_pairs = j.value("duplicate_pairs", spec.duplicate_pairs);
    spec.outage_duration_minutes = j.value("outage_duration_minutes", spec.outage_duration_minutes);
    spec.seed = j.value("seed", spec.seed);
    spec.validate();
    return spec;
}

}  // namespace ckdiag
