#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <string>
#include <vector>

#include "ckdiag/ckdiag.hpp"

namespace fixtures {

inline ckdiag::Alert alert(const std::string& id, const std::string& when,
                           const std::string& title = "") {
    ckdiag::Alert a;
    a.alert_id = id;
    a.title = title.empty() ? id + " threshold exceeded" : title;
    a.service = "svc";
    a.severity = ckdiag::Severity::warning;
    a.fired_at = ckdiag::parse_rfc3339(when);
    return a;
}

inline ckdiag::OutageReport report(const std::string& id, const std::string& start,
                                   const std::string& end, const std::string& symptom,
                                   const std::string& root_cause,
                                   const std::string& remediation) {
    ckdiag::OutageReport r;
    r.outage_id = id;
    r.start_time = ckdiag::parse_rfc3339(start);
    r.resolution_time = ckdiag::parse_rfc3339(end);
    r.symptom_text = symptom;
    r.root_cause_text = root_cause;
    r.remediation_text = remediation;
    return r;
}

// The worked path-scoring example: Alert 1 reaches outage O1's symptom by a
// 1-hop and a 3-hop path and outage O2's symptom by a 1-hop path, so the
// root-cause paths have lengths {2, 4} and {2}.
inline ckdiag::CkGraph figure_graph(const ckdiag::TextProvider& provider) {
    ckdiag::CkGraph ck;
    ck.cpdag.nodes = {"alert1", "alert2", "alert3"};
    ck.cpdag.directed_edges.insert({"alert1", "alert2"});
    ck.cpdag.undirected_edges.insert(ckdiag::unordered_pair("alert2", "alert3"));

    const std::vector<ckdiag::OutageReport> reports = {
        report("O1", "2024-02-01T10:00:00Z", "2024-02-01T11:00:00Z",
               "Checkout latency spiked for most users.", "Connection pool exhausted in the cart database.",
               "Restart the pool and raise the connection cap."),
        report("O2", "2024-03-05T08:00:00Z", "2024-03-05T09:30:00Z",
               "Search results intermittently empty.", "Index shard dropped after a bad deploy.",
               "Roll back the deploy and rebuild the shard."),
    };
    ck.kg = ckdiag::build_kg(reports, provider);
    ck.clusters.labels_symptom = {{"O1", 0}, {"O2", 1}};
    ck.clusters.labels_root_cause = {{"O1", 0}, {"O2", 1}};
    ck.clusters.labels_remediation = {{"O1", 0}, {"O2", 1}};
    ck.clusters.merged = {{"O1", 0}, {"O2", 1}};
    ck.clusters.k_symptom = ck.clusters.k_root_cause = ck.clusters.k_remediation = 2;
    ck.clusters.k_merged = 2;
    ck.caused_outage["alert1"] = {"O1", "O2"};
    ck.caused_outage["alert3"] = {"O1"};
    ck.alert_titles = {{"alert1", "alert1 threshold exceeded"},
                       {"alert2", "alert2 threshold exceeded"},
                       {"alert3", "alert3 threshold exceeded"}};
    ck.metadata.embedding_dim = provider.config().embedding_dim;
    ck.metadata.max_sentences = provider.config().max_sentences;
    return ck;
}

// A 5-node noisy-OR scenario with a collider a -> b <- c and a chain
// b -> d -> e; also used by the causal-recovery acceptance criterion.
inline ckdiag::ScenarioSpec five_node_scenario(std::uint64_t seed, std::size_t n_windows = 10000) {
    ckdiag::ScenarioSpec spec;
    spec.nodes = {{"a", "", "", 0.40}, {"b", "", "", 0.02}, {"c", "", "", 0.40},
                  {"d", "", "", 0.02}, {"e", "", "", 0.02}};
    spec.edges = {{"a", "b", 0.85}, {"c", "b", 0.85}, {"b", "d", 0.85}, {"d", "e", 0.85}};
    spec.n_windows = n_windows;
    spec.t_minutes = 15;
    spec.seed = seed;
    return spec;
}

// A retrieval corpus: one service per outage template (so the planted
// duplicates are the only outages sharing trigger alerts and text), plus a
// few cross-service propagation edges to keep the causal graph non-trivial.
inline ckdiag::ScenarioSpec retrieval_scenario(std::size_t n_outages, std::size_t duplicate_pairs,
                                               std::uint64_t seed) {
    ckdiag::ScenarioSpec spec;
    const std::size_t n_templates = duplicate_pairs + (n_outages - 2 * duplicate_pairs);
    for (std::size_t t = 0; t < n_templates; ++t) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "svc%02zu", t);
        const std::string svc = buf;
        spec.nodes.push_back({svc + "_latency", svc + " latency is high", svc, 0.05});
        spec.nodes.push_back({svc + "_errors", svc + " error rate is high", svc, 0.02});
        spec.edges.push_back({svc + "_latency", svc + "_errors", 0.6});
        if (t > 0 && t % 5 == 0) {
            char prev[16];
            std::snprintf(prev, sizeof(prev), "svc%02zu", t - 1);
            spec.edges.push_back({std::string(prev) + "_errors", svc + "_latency", 0.3});
        }
        ckdiag::OutageTemplate tpl;
        tpl.symptom = "Users saw failures in " + svc + " and requests piled up quickly.";
        tpl.root_cause =
            "The " + svc + " tier saturated because its capacity limits were mis-sized.";
        tpl.remediation = "Resized the " + svc + " tier and drained the request backlog.";
        tpl.trigger_alerts = {svc + "_latency", svc + "_errors"};
        spec.templates.push_back(std::move(tpl));
    }
    spec.n_windows = 3000;
    spec.t_minutes = 15;
    spec.n_outages = n_outages;
    spec.duplicate_pairs = duplicate_pairs;
    spec.outage_duration_minutes = 45;
    spec.seed = seed;
    return spec;
}

inline ckdiag::PipelineConfig small_corpus_config(std::uint64_t seed) {
    ckdiag::PipelineConfig cfg;
    cfg.seed = seed;
    cfg.min_fires = 3;
    cfg.max_cond = 2;
    cfg.t_minutes = 15;
    return cfg;
}

}  // namespace fixtures
