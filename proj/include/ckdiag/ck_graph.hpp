#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/alerts.hpp"
#include "ckdiag/cpdag.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/indicator.hpp"
#include "ckdiag/knowledge_graph.hpp"
#include "ckdiag/text.hpp"

namespace ckdiag {

inline constexpr const char* kCkGraphFormatVersion = "ckdiag.ckgraph/1";

struct BuildMetadata {
    TimeRange period;
    std::int64_t t_minutes = 15;
    double alpha = 0.05;
    std::size_t max_cond = 3;
    std::uint64_t seed = 0;
    Seconds pre_window = hours(1);
    std::string provider_kind = "hashing";
    std::size_t embedding_dim = 256;
    std::size_t max_sentences = 3;
};

// The merged graph: alert CPDAG + knowledge graph + caused-outage links +
// cluster assignment. Immutable once built; traversals share it freely.
struct CkGraph {
    Cpdag cpdag;
    KnowledgeGraph kg;
    ClusterAssignment clusters;
    // alert id -> outage ids whose symptom node it links to
    std::map<std::string, std::set<std::string>> caused_outage;
    // first-seen title per alert, so queries can be made from ids alone
    std::map<std::string, std::string> alert_titles;
    BuildMetadata metadata;

    std::size_t caused_outage_edge_count() const {
        std::size_t n = 0;
        for (const auto& [a, outs] : caused_outage) n += outs.size();
        return n;
    }

    int merged_cluster_of(const std::string& outage_id) const {
        const auto it = clusters.merged.find(outage_id);
        if (it == clusters.merged.end()) {
            throw InvalidArgument("outage '" + outage_id + "' has no merged cluster");
        }
        return it->second;
    }
};

// Adds a caused_outage edge from every alert that fired during an outage's
// [start - pre_window, resolution] span to that outage's symptom node.
// Alerts absent from the CPDAG are skipped with a warning.
inline CkGraph link_alerts_to_symptoms(Cpdag cpdag, KnowledgeGraph kg, ClusterAssignment clusters,
                                       const AlertLog& log,
                                       const std::vector<OutageReport>& reports,
                                       Seconds pre_window = hours(1),
                                       std::vector<std::string>* warnings = nullptr) {
    CkGraph ck;
    ck.cpdag = std::move(cpdag);
    ck.kg = std::move(kg);
    ck.clusters = std::move(clusters);
    ck.alert_titles = log.titles_by_id();
    ck.metadata.pre_window = pre_window;
    std::set<std::string> skipped;
    for (const auto& o : reports) {
        if (!ck.kg.find(o.outage_id)) continue;
        for (const auto& id : alerts_in_outage_window(log, o, pre_window)) {
            if (!ck.cpdag.has_node(id)) {
                skipped.insert(id);
                continue;
            }
            ck.caused_outage[id].insert(o.outage_id);
        }
    }
    if (warnings) {
        for (const auto& id : skipped) {
            warnings->push_back("alert '" + id + "' overlaps an outage but is not a CPDAG node");
        }
    }
    return ck;
}

// Paths from one fired alert to reachable symptom nodes: per outage id,
// path length -> number of distinct simple paths of that length. A path
// follows directed edges forward and undirected edges either way through
// alert nodes, then exactly one caused_outage edge; its length counts every
// edge including the final hop, and must not exceed max_hops.
struct TraversalResult {
    // outage id -> (path length -> distinct path count)
    std::map<std::string, std::map<std::size_t, std::size_t>> by_symptom;
    std::vector<std::string> skipped_alerts;
};

namespace detail {

struct TraversalIndex {
    std::map<std::string, std::vector<std::string>> neighbors;

    explicit TraversalIndex(const Cpdag& g) {
        std::map<std::string, std::set<std::string>> nb;
        for (const auto& [a, b] : g.directed_edges) nb[a].insert(b);
        for (const auto& [a, b] : g.undirected_edges) {
            nb[a].insert(b);
            nb[b].insert(a);
        }
        for (auto& [n, s] : nb) neighbors[n] = {s.begin(), s.end()};
    }
};

inline void enumerate_paths(const CkGraph& ck, const TraversalIndex& index,
                            const std::string& node, std::size_t depth, std::size_t max_hops,
                            std::set<std::string>& visited,
                            std::map<std::string, std::map<std::size_t, std::size_t>>& hits) {
    const auto co = ck.caused_outage.find(node);
    if (co != ck.caused_outage.end() && depth + 1 <= max_hops) {
        for (const auto& outage_id : co->second) ++hits[outage_id][depth + 1];
    }
    if (depth + 1 >= max_hops) return;  // no room for another alert hop plus the final hop
    const auto nb = index.neighbors.find(node);
    if (nb == index.neighbors.end()) return;
    for (const auto& next : nb->second) {
        if (visited.count(next)) continue;
        visited.insert(next);
        enumerate_paths(ck, index, next, depth + 1, max_hops, visited, hits);
        visited.erase(next);
    }
}

}  // namespace detail

// All simple paths from one alert to symptom nodes within max_hops.
inline std::map<std::string, std::map<std::size_t, std::size_t>> traverse_from_alert(
    const CkGraph& ck, const std::string& alert_id, std::size_t max_hops) {
    std::map<std::string, std::map<std::size_t, std::size_t>> hits;
    if (!ck.cpdag.has_node(alert_id)) return hits;
    const detail::TraversalIndex index(ck.cpdag);
    std::set<std::string> visited{alert_id};
    detail::enumerate_paths(ck, index, alert_id, 0, max_hops, visited, hits);
    return hits;
}

// Aggregated traversal from a set of fired alerts. Fired alerts absent from
// the graph are reported in skipped_alerts; if all are absent the result is
// empty.
inline TraversalResult traverse_to_symptoms(const CkGraph& ck, const std::set<std::string>& fired,
                                            std::size_t max_hops = 9) {
    if (max_hops < 1) throw InvalidArgument("traverse_to_symptoms: max_hops must be >= 1");
    TraversalResult out;
    const detail::TraversalIndex index(ck.cpdag);
    for (const auto& alert_id : fired) {
        if (!ck.cpdag.has_node(alert_id)) {
            out.skipped_alerts.push_back(alert_id);
            continue;
        }
        std::map<std::string, std::map<std::size_t, std::size_t>> hits;
        std::set<std::string> visited{alert_id};
        detail::enumerate_paths(ck, index, alert_id, 0, max_hops, visited, hits);
        for (const auto& [outage_id, by_len] : hits) {
            for (const auto& [len, count] : by_len) out.by_symptom[outage_id][len] += count;
        }
    }
    return out;
}

namespace detail {

inline nlohmann::json metadata_to_json(const BuildMetadata& m) {
    return {{"period", {{"start", format_rfc3339(m.period.start)}, {"end", format_rfc3339(m.period.end)}}},
            {"t_minutes", m.t_minutes},
            {"alpha", m.alpha},
            {"max_cond", m.max_cond},
            {"seed", m.seed},
            {"pre_window_seconds", m.pre_window},
            {"provider", {{"kind", m.provider_kind},
                          {"embedding_dim", m.embedding_dim},
                          {"max_sentences", m.max_sentences}}}};
}

inline BuildMetadata metadata_from_json(const nlohmann::json& j) {
    BuildMetadata m;
    m.period.start = parse_rfc3339(j.at("period").at("start").get<std::string>());
    m.period.end = parse_rfc3339(j.at("period").at("end").get<std::string>());
    m.t_minutes = j.at("t_minutes").get<std::int64_t>();
    m.alpha = j.at("alpha").get<double>();
    m.max_cond = j.at("max_cond").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.pre_window = j.at("pre_window_seconds").get<Seconds>();
    m.provider_kind = j.at("provider").at("kind").get<std::string>();
    m.embedding_dim = j.at("provider").at("embedding_dim").get<std::size_t>();
    m.max_sentences = j.at("provider").at("max_sentences").get<std::size_t>();
    return m;
}

inline nlohmann::json labels_to_json(const std::map<std::string, int>& labels) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : labels) j[k] = v;
    return j;
}

inline std::map<std::string, int> labels_from_json(const nlohmann::json& j) {
    std::map<std::string, int> out;
    for (const auto& [k, v] : j.items()) out[k] = v.get<int>();
    return out;
}

inline nlohmann::json clusters_to_json(const ClusterAssignment& c) {
    return {{"symptom", labels_to_json(c.labels_symptom)},
            {"root_cause", labels_to_json(c.labels_root_cause)},
            {"remediation", labels_to_json(c.labels_remediation)},
            {"merged", labels_to_json(c.merged)},
            {"k", {{"symptom", c.k_symptom},
                   {"root_cause", c.k_root_cause},
                   {"remediation", c.k_remediation},
                   {"merged", c.k_merged}}}};
}

inline ClusterAssignment clusters_from_json(const nlohmann::json& j) {
    ClusterAssignment c;
    c.labels_symptom = labels_from_json(j.at("symptom"));
    c.labels_root_cause = labels_from_json(j.at("root_cause"));
    c.labels_remediation = labels_from_json(j.at("remediation"));
    c.merged = labels_from_json(j.at("merged"));
    c.k_symptom = j.at("k").at("symptom").get<std::size_t>();
    c.k_root_cause = j.at("k").at("root_cause").get<std::size_t>();
    c.k_remediation = j.at("k").at("remediation").get<std::size_t>();
    c.k_merged = j.at("k").at("merged").get<std::size_t>();
    return c;
}

}  // namespace detail

inline nlohmann::json ck_graph_to_json(const CkGraph& ck) {
    nlohmann::json caused = nlohmann::json::object();
    for (const auto& [alert, outages] : ck.caused_outage) {
        caused[alert] = std::vector<std::string>(outages.begin(), outages.end());
    }
    nlohmann::json titles = nlohmann::json::object();
    for (const auto& [id, title] : ck.alert_titles) titles[id] = title;
    return {{"version", kCkGraphFormatVersion},
            {"metadata", detail::metadata_to_json(ck.metadata)},
            {"cpdag", cpdag_to_json(ck.cpdag)},
            {"kg", detail::kg_to_json(ck.kg)},
            {"clusters", detail::clusters_to_json(ck.clusters)},
            {"caused_outage", caused},
            {"alert_titles", titles}};
}

inline CkGraph ck_graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("version")) {
        throw FormatError("not a CK graph document");
    }
    const std::string version = j.at("version").get<std::string>();
    if (version != kCkGraphFormatVersion) {
        throw VersionError("unsupported CK graph version '" + version + "' (expected '" +
                           kCkGraphFormatVersion + "')");
    }
    CkGraph ck;
    ck.metadata = detail::metadata_from_json(j.at("metadata"));
    ck.cpdag = cpdag_from_json(j.at("cpdag"));
    ck.kg = detail::kg_from_json(j.at("kg"));
    ck.clusters = detail::clusters_from_json(j.at("clusters"));
    for (const auto& [alert, outages] : j.at("caused_outage").items()) {
        for (const auto& o : outages) ck.caused_outage[alert].insert(o.get<std::string>());
    }
    for (const auto& [id, title] : j.at("alert_titles").items()) {
        ck.alert_titles[id] = title.get<std::string>();
    }
    return ck;
}

inline void save_ck_graph(const CkGraph& ck, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CK graph to '" + path + "'");
    out << ck_graph_to_json(ck).dump(2) << '\n';
}

inline CkGraph load_ck_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read CK graph from '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError("corrupted CK graph document '" + path + "': " + e.what());
    }
    return ck_graph_from_json(j);
}

}  // namespace ckdiag
