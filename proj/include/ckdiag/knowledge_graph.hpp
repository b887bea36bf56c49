#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/alerts.hpp"
#include "ckdiag/clustering.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/text.hpp"

namespace ckdiag {

enum class NodeKind { symptom, root_cause, remediation };

inline std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::symptom: return "symptom";
        case NodeKind::root_cause: return "root_cause";
        case NodeKind::remediation: return "remediation";
    }
    return "symptom";
}

struct KgNode {
    std::string outage_id;
    NodeKind kind = NodeKind::symptom;
    SummaryText summary;
    EmbeddingVector embedding;

    std::string node_id() const { return to_string(kind) + ":" + outage_id; }
};

// Knowledge graph over outage reports: one symptom, root-cause and
// remediation node per outage, with implicit has_root_cause and
// has_remediation edges from the symptom (they are one-to-one by
// construction, so the entry itself is the edge pair).
struct KnowledgeGraph {
    struct Entry {
        std::string outage_id;
        Timestamp start_time = 0;
        Timestamp resolution_time = 0;
        KgNode symptom;
        KgNode root_cause;
        KgNode remediation;
    };

    std::vector<Entry> entries;  // sorted by outage_id

    std::size_t size() const { return entries.size(); }
    std::size_t node_count() const { return entries.size() * 3; }
    std::size_t edge_count() const { return entries.size() * 2; }

    const Entry* find(const std::string& outage_id) const {
        const auto it = std::lower_bound(
            entries.begin(), entries.end(), outage_id,
            [](const Entry& e, const std::string& id) { return e.outage_id < id; });
        if (it == entries.end() || it->outage_id != outage_id) return nullptr;
        return &*it;
    }
};

// Builds the KG: each report contributes three summarized + embedded nodes.
inline KnowledgeGraph build_kg(const std::vector<OutageReport>& reports,
                               const TextProvider& provider) {
    if (reports.empty()) throw InvalidArgument("build_kg: no outage reports");
    KnowledgeGraph kg;
    for (const auto& r : reports) {
        r.validate();
        KnowledgeGraph::Entry e;
        e.outage_id = r.outage_id;
        e.start_time = r.start_time;
        e.resolution_time = r.resolution_time;
        auto make_node = [&](NodeKind kind, const std::string& text) {
            KgNode n;
            n.outage_id = r.outage_id;
            n.kind = kind;
            n.summary = provider.summarize(text);
            n.embedding = provider.embed_text(n.summary.text);
            return n;
        };
        e.symptom = make_node(NodeKind::symptom, r.symptom_text);
        e.root_cause = make_node(NodeKind::root_cause, r.root_cause_text);
        e.remediation = make_node(NodeKind::remediation, r.remediation_text);
        kg.entries.push_back(std::move(e));
    }
    std::sort(kg.entries.begin(), kg.entries.end(),
              [](const auto& a, const auto& b) { return a.outage_id < b.outage_id; });
    for (std::size_t i = 1; i < kg.entries.size(); ++i) {
        if (kg.entries[i].outage_id == kg.entries[i - 1].outage_id) {
            throw InvalidArgument("build_kg: duplicate outage_id '" + kg.entries[i].outage_id + "'");
        }
    }
    return kg;
}

// Per-view and merged cluster labels for every outage.
struct ClusterAssignment {
    std::map<std::string, int> labels_symptom;
    std::map<std::string, int> labels_root_cause;
    std::map<std::string, int> labels_remediation;
    std::map<std::string, int> merged;
    std::size_t k_symptom = 0;
    std::size_t k_root_cause = 0;
    std::size_t k_remediation = 0;
    std::size_t k_merged = 0;
};

// Clusters each node kind separately (silhouette-selected K, within
// `tolerance` of the best score) and merges the three partitions
// transitively. Corpora with fewer than 3 outages skip the silhouette search
// and fall back to singleton clusters per view.
inline ClusterAssignment cluster_outages(const KnowledgeGraph& kg, std::size_t k_max_cap = 150,
                                         double tolerance = 0.05) {
    const std::size_t n = kg.size();
    if (n == 0) throw InvalidArgument("cluster_outages: empty knowledge graph");
    ClusterAssignment out;

    auto label_view = [&](NodeKind kind, std::map<std::string, int>& labels) -> std::size_t {
        std::vector<EmbeddingVector> embs;
        embs.reserve(n);
        for (const auto& e : kg.entries) {
            switch (kind) {
                case NodeKind::symptom: embs.push_back(e.symptom.embedding); break;
                case NodeKind::root_cause: embs.push_back(e.root_cause.embedding); break;
                case NodeKind::remediation: embs.push_back(e.remediation.embedding); break;
            }
        }
        std::vector<int> view_labels;
        std::size_t k;
        if (n < 3) {
            k = n;
            view_labels.resize(n);
            for (std::size_t i = 0; i < n; ++i) view_labels[i] = static_cast<int>(i);
        } else {
            const std::size_t k_max = std::min(n - 1, k_max_cap);
            k = select_optimal_k(embs, k_max, tolerance);
            view_labels = agglomerative_cluster(embs, k);
        }
        for (std::size_t i = 0; i < n; ++i) labels[kg.entries[i].outage_id] = view_labels[i];
        return k;
    };

    out.k_symptom = label_view(NodeKind::symptom, out.labels_symptom);
    out.k_root_cause = label_view(NodeKind::root_cause, out.labels_root_cause);
    out.k_remediation = label_view(NodeKind::remediation, out.labels_remediation);
    out.merged = merge_clusters(out.labels_symptom, out.labels_root_cause, out.labels_remediation);
    int max_label = -1;
    for (const auto& [id, l] : out.merged) max_label = std::max(max_label, l);
    out.k_merged = static_cast<std::size_t>(max_label + 1);
    return out;
}

namespace detail {

inline nlohmann::json embedding_to_json(const EmbeddingVector& e) {
    return {{"values", e.values},
            {"source", e.source_kind == EmbeddingSource::hashing ? "hashing" : "external"},
            {"degenerate", e.degenerate}};
}

inline EmbeddingVector embedding_from_json(const nlohmann::json& j) {
    EmbeddingVector e;
    e.values = j.at("values").get<std::vector<double>>();
    e.source_kind = j.at("source").get<std::string>() == "external" ? EmbeddingSource::external
                                                                    : EmbeddingSource::hashing;
    e.degenerate = j.at("degenerate").get<bool>();
    return e;
}

inline nlohmann::json kg_node_to_json(const KgNode& n) {
    return {{"id", n.node_id()},
            {"kind", to_string(n.kind)},
            {"outage_id", n.outage_id},
            {"summary", n.summary.text},
            {"embedding", embedding_to_json(n.embedding)}};
}

inline void kg_node_from_json(const nlohmann::json& j, KgNode& n, NodeKind kind) {
    n.kind = kind;
    n.outage_id = j.at("outage_id").get<std::string>();
    n.summary.text = j.at("summary").get<std::string>();
    n.embedding = embedding_from_json(j.at("embedding"));
}

inline nlohmann::json kg_to_json(const KnowledgeGraph& kg) {
    nlohmann::json nodes = nlohmann::json::array();
    nlohmann::json edges = nlohmann::json::array();
    nlohmann::json outages = nlohmann::json::array();
    for (const auto& e : kg.entries) {
        nodes.push_back(kg_node_to_json(e.symptom));
        nodes.push_back(kg_node_to_json(e.root_cause));
        nodes.push_back(kg_node_to_json(e.remediation));
        edges.push_back({e.symptom.node_id(), e.root_cause.node_id(), "has_root_cause"});
        edges.push_back({e.symptom.node_id(), e.remediation.node_id(), "has_remediation"});
        outages.push_back({{"outage_id", e.outage_id},
                           {"start_time", format_rfc3339(e.start_time)},
                           {"resolution_time", format_rfc3339(e.resolution_time)}});
    }
    return {{"nodes", nodes}, {"edges", edges}, {"outages", outages}};
}

inline KnowledgeGraph kg_from_json(const nlohmann::json& j) {
    KnowledgeGraph kg;
    std::map<std::string, KnowledgeGraph::Entry> entries;
    for (const auto& o : j.at("outages")) {
        KnowledgeGraph::Entry e;
        e.outage_id = o.at("outage_id").get<std::string>();
        e.start_time = parse_rfc3339(o.at("start_time").get<std::string>());
        e.resolution_time = parse_rfc3339(o.at("resolution_time").get<std::string>());
        entries[e.outage_id] = std::move(e);
    }
    for (const auto& nj : j.at("nodes")) {
        const std::string kind_s = nj.at("kind").get<std::string>();
        const std::string outage_id = nj.at("outage_id").get<std::string>();
        auto it = entries.find(outage_id);
        if (it == entries.end()) throw FormatError("kg node references unknown outage " + outage_id);
        if (kind_s == "symptom") {
            kg_node_from_json(nj, it->second.symptom, NodeKind::symptom);
        } else if (kind_s == "root_cause") {
            kg_node_from_json(nj, it->second.root_cause, NodeKind::root_cause);
        } else if (kind_s == "remediation") {
            kg_node_from_json(nj, it->second.remediation, NodeKind::remediation);
        } else {
            throw FormatError("kg node with unknown kind '" + kind_s + "'");
        }
    }
    for (auto& [id, e] : entries) kg.entries.push_back(std::move(e));
    return kg;  // map order keeps entries sorted by outage_id
}

}  // namespace detail

}  // namespace ckdiag
