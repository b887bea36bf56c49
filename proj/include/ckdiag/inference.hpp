#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/ck_graph.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/random_forest.hpp"
#include "ckdiag/text.hpp"

namespace ckdiag {

struct Recommendation {
    std::string outage_id;
    std::string root_cause_summary;
    std::string remediation_summary;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based
    std::string method;
    std::optional<int> cluster_id;  // clust only
};

struct InferenceQuery {
    std::set<std::string> fired_alert_ids;
    std::vector<std::string> fired_alert_titles;  // optional, defaults to stored titles
    std::size_t k_hops = 9;
    std::size_t top_l = 3;
    std::size_t top_n = 5;

    void validate() const {
        if (fired_alert_ids.empty()) throw InvalidArgument("query: fired alert set is empty");
        if (k_hops < 1 || top_l < 1 || top_n < 1) {
            throw InvalidArgument("query: k, L and top_n must all be >= 1");
        }
    }
};

struct InferenceResult {
    std::string method;
    std::vector<Recommendation> recommendations;
    std::string note;  // non-empty when the result is degraded (fallback, nothing reachable)
    std::vector<std::string> warnings;
};

namespace detail {

inline Recommendation make_recommendation(const KnowledgeGraph::Entry& e, double score,
                                          const std::string& method) {
    Recommendation r;
    r.outage_id = e.outage_id;
    r.root_cause_summary = e.root_cause.summary.text;
    r.remediation_summary = e.remediation.summary.text;
    r.score = score;
    r.method = method;
    return r;
}

// Sorts by descending score, outage id breaking ties, keeps top_n, assigns
// ranks.
inline void finalize(std::vector<Recommendation>& recs, std::size_t top_n) {
    std::sort(recs.begin(), recs.end(), [](const Recommendation& a, const Recommendation& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.outage_id < b.outage_id;
    });
    if (recs.size() > top_n) recs.resize(top_n);
    for (std::size_t i = 0; i < recs.size(); ++i) recs[i].rank = i + 1;
}

inline std::vector<std::string> query_titles(const CkGraph& ck, const InferenceQuery& q) {
    if (!q.fired_alert_titles.empty()) return q.fired_alert_titles;
    std::vector<std::string> titles;
    for (const auto& id : q.fired_alert_ids) {
        const auto it = ck.alert_titles.find(id);
        titles.push_back(it != ck.alert_titles.end() ? it->second : id);
    }
    return titles;
}

// Similarity of the query embedding to each candidate outage's symptom
// embedding. Degenerate stored embeddings rank last.
inline std::vector<Recommendation> rank_by_similarity(const CkGraph& ck,
                                                      const EmbeddingVector& query,
                                                      const std::set<std::string>* candidates,
                                                      const std::string& method) {
    std::vector<Recommendation> recs;
    for (const auto& e : ck.kg.entries) {
        if (candidates && !candidates->count(e.outage_id)) continue;
        const double score =
            e.symptom.embedding.degenerate ? -1.0 : cosine_similarity(query, e.symptom.embedding);
        recs.push_back(make_recommendation(e, score, method));
    }
    return recs;
}

}  // namespace detail

// Path inference: every simple path of length <= k from a fired alert to a
// symptom node extends one hop to that outage's root cause, and contributes
// the inverse of its total length to the outage's score.
inline InferenceResult infer_path(const CkGraph& ck, const InferenceQuery& q) {
    q.validate();
    InferenceResult out;
    out.method = "path";
    const TraversalResult trav = traverse_to_symptoms(ck, q.fired_alert_ids, q.k_hops);
    for (const auto& id : trav.skipped_alerts) {
        out.warnings.push_back("fired alert '" + id + "' is not in the graph; skipped");
    }
    if (trav.by_symptom.empty()) {
        out.note = trav.skipped_alerts.size() == q.fired_alert_ids.size()
                       ? "no fired alert is present in the graph"
                       : "no symptom node reachable within k hops";
        return out;
    }
    std::vector<Recommendation> recs;
    for (const auto& [outage_id, by_len] : trav.by_symptom) {
        const auto* entry = ck.kg.find(outage_id);
        if (!entry) continue;
        double score = 0.0;
        for (const auto& [len, count] : by_len) {
            score += static_cast<double>(count) / static_cast<double>(len + 1);
        }
        recs.push_back(detail::make_recommendation(*entry, score, "path"));
    }
    detail::finalize(recs, q.top_n);
    out.recommendations = std::move(recs);
    return out;
}

// Similarity inference: the query embedding is the renormalized mean of the
// fired alerts' title embeddings; every stored symptom is scored by cosine.
inline InferenceResult infer_sim(const CkGraph& ck, const InferenceQuery& q,
                                 const TextProvider& provider) {
    q.validate();
    if (provider.config().embedding_dim != ck.metadata.embedding_dim) {
        throw ProviderError("provider embedding dimension " +
                            std::to_string(provider.config().embedding_dim) +
                            " does not match graph dimension " +
                            std::to_string(ck.metadata.embedding_dim));
    }
    InferenceResult out;
    out.method = "sim";
    const EmbeddingVector query = provider.embed_alert_set(detail::query_titles(ck, q));
    if (query.degenerate) {
        out.note = "query embedding is degenerate (titles carry no tokens)";
        return out;
    }
    auto recs = detail::rank_by_similarity(ck, query, nullptr, "sim");
    detail::finalize(recs, q.top_n);
    out.recommendations = std::move(recs);
    return out;
}

// Cluster inference: combines the traversal-based cluster weights with the
// forest's cluster probabilities, keeps the top-L clusters, and ranks their
// symptoms by similarity. A null model stands in for an untrainable
// predictor (single-cluster corpus) and contributes a uniform distribution.
inline InferenceResult infer_clust(const CkGraph& ck, const ForestModel* model,
                                   const InferenceQuery& q, const TextProvider& provider) {
    q.validate();
    if (provider.config().embedding_dim != ck.metadata.embedding_dim) {
        throw ProviderError("provider embedding dimension does not match graph");
    }
    const std::set<int> graph_clusters = [&ck] {
        std::set<int> s;
        for (const auto& [id, label] : ck.clusters.merged) s.insert(label);
        return s;
    }();
    if (model) {
        for (int c : model->classes) {
            if (!graph_clusters.count(c)) {
                throw InvalidArgument("model class " + std::to_string(c) +
                                      " is not a merged cluster of this graph");
            }
        }
    }

    InferenceResult out;
    out.method = "clust";

    // Cluster_Rank_1: one hit per (fired alert, reached symptom) pair.
    std::map<int, double> rank1;
    double total_hits = 0.0;
    for (const auto& alert_id : q.fired_alert_ids) {
        if (!ck.cpdag.has_node(alert_id)) {
            out.warnings.push_back("fired alert '" + alert_id + "' is not in the graph; skipped");
            continue;
        }
        for (const auto& [outage_id, by_len] : traverse_from_alert(ck, alert_id, q.k_hops)) {
            rank1[ck.merged_cluster_of(outage_id)] += 1.0;
            total_hits += 1.0;
        }
    }
    if (total_hits > 0.0) {
        for (auto& [c, w] : rank1) w /= total_hits;
    }

    // Cluster_Rank_2: forest probabilities for the fired-alert indicator.
    std::map<int, double> rank2;
    bool uniform_model = true;
    if (model) {
        std::vector<std::string> unknown;
        const auto probs =
            predict_proba(*model, indicator_vector(*model, q.fired_alert_ids, &unknown));
        for (std::size_t i = 0; i < model->classes.size(); ++i) rank2[model->classes[i]] = probs[i];
        double lo = probs[0], hi = probs[0];
        for (double p : probs) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        uniform_model = hi - lo < 1e-12;
    } else {
        const double u = 1.0 / static_cast<double>(graph_clusters.size());
        for (int c : graph_clusters) rank2[c] = u;
    }
    const EmbeddingVector query = provider.embed_alert_set(detail::query_titles(ck, q));
    if (query.degenerate) {
        out.note = "query embedding is degenerate (titles carry no tokens)";
        return out;
    }
    if (total_hits == 0.0 && uniform_model) {
        // Neither signal distinguishes clusters; fall back to plain
        // similarity over every symptom.
        auto recs = detail::rank_by_similarity(ck, query, nullptr, "clust");
        detail::finalize(recs, q.top_n);
        out.recommendations = std::move(recs);
        out.note = "fallback: no reachable symptom and uninformative cluster predictor";
        return out;
    }

    std::map<int, double> combined;
    for (int c : graph_clusters) {
        double w = 0.0;
        if (const auto it = rank1.find(c); it != rank1.end()) w += it->second;
        if (const auto it = rank2.find(c); it != rank2.end()) w += it->second;
        combined[c] = w;
    }
    std::vector<int> cluster_order;
    for (const auto& [c, w] : combined) cluster_order.push_back(c);
    std::sort(cluster_order.begin(), cluster_order.end(), [&combined](int a, int b) {
        if (combined[a] != combined[b]) return combined[a] > combined[b];
        return a < b;
    });
    if (cluster_order.size() > q.top_l) cluster_order.resize(q.top_l);
    const std::set<int> selected(cluster_order.begin(), cluster_order.end());

    std::set<std::string> candidates;
    for (const auto& [outage_id, label] : ck.clusters.merged) {
        if (selected.count(label)) candidates.insert(outage_id);
    }
    auto recs = detail::rank_by_similarity(ck, query, &candidates, "clust");
    for (auto& r : recs) r.cluster_id = ck.merged_cluster_of(r.outage_id);
    detail::finalize(recs, q.top_n);
    out.recommendations = std::move(recs);
    return out;
}

inline InferenceResult infer_clust(const CkGraph& ck, const ForestModel& model,
                                   const InferenceQuery& q, const TextProvider& provider) {
    return infer_clust(ck, &model, q, provider);
}

inline nlohmann::json recommendation_to_json(const Recommendation& r) {
    nlohmann::json j = {{"rank", r.rank},
                        {"score", r.score},
                        {"method", r.method},
                        {"outage_id", r.outage_id},
                        {"root_cause", r.root_cause_summary},
                        {"remediation", r.remediation_summary}};
    if (r.cluster_id) j["cluster_id"] = *r.cluster_id;
    return j;
}

inline nlohmann::json inference_result_to_json(const InferenceResult& res,
                                               const InferenceQuery& q) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : res.recommendations) recs.push_back(recommendation_to_json(r));
    nlohmann::json j = {{"method", res.method},
                        {"query", {{"alert_ids", std::vector<std::string>(q.fired_alert_ids.begin(),
                                                                          q.fired_alert_ids.end())},
                                   {"k", q.k_hops},
                                   {"L", q.top_l},
                                   {"top_n", q.top_n}}},
                        {"recommendations", recs}};
    if (!res.note.empty()) j["note"] = res.note;
    if (!res.warnings.empty()) j["warnings"] = res.warnings;
    return j;
}

}  // namespace ckdiag
