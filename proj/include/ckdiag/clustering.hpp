#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ckdiag/error.hpp"
#include "ckdiag/text.hpp"

namespace ckdiag {

// Cosine distance with a defined value for degenerate (zero) embeddings:
// two degenerates coincide, a degenerate is maximally far from anything else.
inline double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.degenerate && b.degenerate) return 0.0;
    if (a.degenerate || b.degenerate) return 1.0;
    return 1.0 - cosine_similarity(a, b);
}

namespace detail {

struct MergeStep {
    std::size_t left;   // cluster ids being merged (smallest-member convention)
    std::size_t right;
};

// Average-linkage agglomerative clustering under cosine distance.
// Ties are broken toward the pair with the smallest (left, right) member
// indices, so the dendrogram is a pure function of the inputs.
class Dendrogram {
public:
    explicit Dendrogram(const std::vector<EmbeddingVector>& embeddings)
        : n_(embeddings.size()) {
        dist_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double d = cosine_distance(embeddings[i], embeddings[j]);
                dist_[i * n_ + j] = d;
                dist_[j * n_ + i] = d;
            }
        }
        compute();
    }

    std::size_t size() const { return n_; }

    // Cluster labels after cutting at k clusters. Labels are dense indices
    // ordered by each cluster's smallest member.
    std::vector<int> cut(std::size_t k) const {
        if (k < 1 || k > n_) throw InvalidArgument("cluster count must be in [1, n]");
        std::vector<std::size_t> parent(n_);
        std::iota(parent.begin(), parent.end(), 0);
        std::vector<std::size_t> leader(n_);  // smallest member of each set
        std::iota(leader.begin(), leader.end(), 0);
        auto find = [&parent](std::size_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (std::size_t step = 0; step + k < n_; ++step) {
            const auto a = find(merges_[step].left);
            const auto b = find(merges_[step].right);
            parent[b] = a;
            leader[a] = std::min(leader[a], leader[b]);
        }
        std::map<std::size_t, int> label_of_leader;
        for (std::size_t i = 0; i < n_; ++i) label_of_leader[leader[find(i)]] = 0;
        int next = 0;
        for (auto& [lead, label] : label_of_leader) label = next++;
        std::vector<int> labels(n_);
        for (std::size_t i = 0; i < n_; ++i) labels[i] = label_of_leader[leader[find(i)]];
        return labels;
    }

private:
    void compute() {
        // active cluster -> members; cluster key is its smallest member
        std::map<std::size_t, std::vector<std::size_t>> clusters;
        for (std::size_t i = 0; i < n_; ++i) clusters[i] = {i};
        // average pairwise distance between clusters, updated Lance-Williams style
        std::map<std::pair<std::size_t, std::size_t>, double> cd;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) cd[{i, j}] = dist_[i * n_ + j];
        }
        while (clusters.size() > 1) {
            std::pair<std::size_t, std::size_t> best{0, 0};
            double best_d = 0.0;
            bool first = true;
            for (const auto& [key, d] : cd) {
                if (first || d < best_d) {
                    best = key;
                    best_d = d;
                    first = false;
                }
                // map iteration is ordered by (left, right), so on exact ties
                // the first seen pair wins
            }
            merges_.push_back({best.first, best.second});
            const auto& left = clusters[best.first];
            const auto& right = clusters[best.second];
            const double nl = static_cast<double>(left.size());
            const double nr = static_cast<double>(right.size());
            for (const auto& [other, members] : clusters) {
                if (other == best.first || other == best.second) continue;
                const double dl = cd.at(ordered(best.first, other));
                const double dr = cd.at(ordered(best.second, other));
                cd[ordered(best.first, other)] = (nl * dl + nr * dr) / (nl + nr);
                cd.erase(ordered(best.second, other));
            }
            cd.erase(best);
            auto& merged = clusters[best.first];
            merged.insert(merged.end(), right.begin(), right.end());
            clusters.erase(best.second);
        }
    }

    static std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    std::size_t n_;
    std::vector<double> dist_;
    std::vector<MergeStep> merges_;
};

}  // namespace detail

// Average-linkage agglomerative clustering under cosine distance, cut at k.
inline std::vector<int> agglomerative_cluster(const std::vector<EmbeddingVector>& embeddings,
                                              std::size_t k) {
    if (embeddings.empty()) throw InvalidArgument("agglomerative_cluster: no points");
    if (k < 1 || k > embeddings.size()) {
        throw InvalidArgument("agglomerative_cluster: k must be in [1, n]");
    }
    return detail::Dendrogram(embeddings).cut(k);
}

// Mean silhouette over all points, cosine distance. Singleton points score 0.
inline double silhouette_score(const std::vector<EmbeddingVector>& embeddings,
                               const std::vector<int>& labels) {
    const std::size_t n = embeddings.size();
    if (labels.size() != n) throw InvalidArgument("silhouette: labels/points size mismatch");
    std::map<int, std::size_t> cluster_sizes;
    for (int l : labels) ++cluster_sizes[l];
    if (cluster_sizes.size() < 2) throw InvalidArgument("silhouette: need at least 2 clusters");
    for (const auto& [l, size] : cluster_sizes) {
        if (size == 0) throw InvalidArgument("silhouette: empty cluster");
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cluster_sizes[labels[i]] == 1) continue;  // singleton scores 0
        std::map<int, double> sum_d;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_d[labels[j]] += cosine_distance(embeddings[i], embeddings[j]);
        }
        const double a =
            sum_d[labels[i]] / static_cast<double>(cluster_sizes[labels[i]] - 1);
        double b = 0.0;
        bool first = true;
        for (const auto& [l, s] : sum_d) {
            if (l == labels[i]) continue;
            const double mean = s / static_cast<double>(cluster_sizes[l]);
            if (first || mean < b) {
                b = mean;
                first = false;
            }
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

// The selection rule on its own: smallest K whose score is within
// `tolerance` of the best one. When every score is negative nothing can sit
// within a positive-relative band of the maximum, so the argmax wins.
inline std::size_t select_k_from_scores(const std::vector<std::pair<std::size_t, double>>& scores,
                                        double tolerance) {
    if (scores.empty()) throw InvalidArgument("select_k_from_scores: no candidates");
    double best = scores.front().second;
    for (const auto& [k, s] : scores) best = std::max(best, s);
    const double threshold = best >= 0.0 ? (1.0 - tolerance) * best : best;
    for (const auto& [k, s] : scores) {
        if (s >= threshold) return k;
    }
    return scores.front().first;  // unreachable: best itself passes
}

// Smallest cluster count in [2, k_max] whose silhouette is within
// `tolerance` of the best one.
inline std::size_t select_optimal_k(const std::vector<EmbeddingVector>& embeddings,
                                    std::size_t k_max, double tolerance = 0.05) {
    const std::size_t n = embeddings.size();
    if (n < 3) throw InvalidArgument("select_optimal_k: need at least 3 points");
    if (k_max > n) throw InvalidArgument("select_optimal_k: k_max must be <= n");
    if (k_max < 2) throw InvalidArgument("select_optimal_k: k_max must be >= 2");

    detail::Dendrogram dendro(embeddings);
    std::vector<std::pair<std::size_t, double>> scores;
    for (std::size_t k = 2; k <= k_max; ++k) {
        scores.emplace_back(k, silhouette_score(embeddings, dendro.cut(k)));
    }
    return select_k_from_scores(scores, tolerance);
}

// Transitive closure of "shares a cluster in any view": outages are unioned
// whenever any of the three label maps puts them in the same cluster.
// Returns dense merged labels keyed like the inputs, component index ordered
// by smallest member key.
inline std::map<std::string, int> merge_clusters(const std::map<std::string, int>& by_symptom,
                                                 const std::map<std::string, int>& by_root_cause,
                                                 const std::map<std::string, int>& by_remediation) {
    if (by_symptom.size() != by_root_cause.size() || by_symptom.size() != by_remediation.size()) {
        throw InvalidArgument("merge_clusters: label maps must share a key set");
    }
    std::vector<std::string> keys;
    for (const auto& [k, v] : by_symptom) {
        if (!by_root_cause.count(k) || !by_remediation.count(k)) {
            throw InvalidArgument("merge_clusters: label maps must share a key set");
        }
        keys.push_back(k);
    }
    std::vector<std::size_t> parent(keys.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    for (const auto* view : {&by_symptom, &by_root_cause, &by_remediation}) {
        std::map<int, std::size_t> first_with_label;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const int label = view->at(keys[i]);
            auto [it, inserted] = first_with_label.emplace(label, i);
            if (!inserted) unite(it->second, i);
        }
    }
    std::map<std::string, int> merged;
    std::map<std::size_t, int> component_label;
    int next = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const std::size_t root = find(i);
        auto [it, inserted] = component_label.emplace(root, next);
        if (inserted) ++next;
        merged[keys[i]] = it->second;
    }
    return merged;
}

}  // namespace ckdiag
