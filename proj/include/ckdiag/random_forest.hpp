#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/ck_graph.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/rng.hpp"

namespace ckdiag {

inline constexpr const char* kForestFormatVersion = "ckdiag.forest/1";

// Per-outage binary alert-occurrence rows labelled with merged cluster ids.
struct TrainingSet {
    std::vector<std::string> feature_names;       // alert universe, sorted
    std::vector<std::string> row_ids;             // outage ids
    std::vector<std::vector<std::uint8_t>> rows;  // |rows| x |feature_names|
    std::vector<int> labels;                      // merged cluster per row

    std::size_t size() const { return rows.size(); }
};

// One row per outage: feature j = 1 iff alert j fired during the outage's
// [start - pre_window, resolution] span. The feature universe is the CPDAG
// node set. Outages without a single overlapping universe alert keep their
// all-zero row and are reported through `warnings`.
inline TrainingSet build_training_set(const CkGraph& ck, const AlertLog& log,
                                      const std::vector<OutageReport>& reports,
                                      std::vector<std::string>* warnings = nullptr) {
    TrainingSet ts;
    ts.feature_names = ck.cpdag.nodes;
    std::vector<const OutageReport*> sorted;
    for (const auto& r : reports) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const OutageReport* a, const OutageReport* b) { return a->outage_id < b->outage_id; });
    for (const OutageReport* r : sorted) {
        const auto fired = alerts_in_outage_window(log, *r, ck.metadata.pre_window);
        std::vector<std::uint8_t> row(ts.feature_names.size(), 0);
        bool any = false;
        for (std::size_t j = 0; j < ts.feature_names.size(); ++j) {
            if (fired.count(ts.feature_names[j])) {
                row[j] = 1;
                any = true;
            }
        }
        if (!any && warnings) {
            warnings->push_back("outage '" + r->outage_id + "' overlaps no universe alert");
        }
        ts.row_ids.push_back(r->outage_id);
        ts.rows.push_back(std::move(row));
        ts.labels.push_back(ck.merged_cluster_of(r->outage_id));
    }
    return ts;
}

namespace detail {

// Flat binary decision tree over 0/1 features. feature < 0 marks a leaf.
struct TreeNode {
    int feature = -1;
    int child0 = -1;  // feature == 0 branch
    int child1 = -1;  // feature == 1 branch
    std::vector<double> dist;  // leaf class distribution
};

struct Tree {
    std::vector<TreeNode> nodes;

    const std::vector<double>& leaf_for(const std::vector<std::uint8_t>& x) const {
        int at = 0;
        while (nodes[at].feature >= 0) {
            at = x[static_cast<std::size_t>(nodes[at].feature)] ? nodes[at].child1
                                                                : nodes[at].child0;
        }
        return nodes[at].dist;
    }
};

inline double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double impurity = 1.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        impurity -= p * p;
    }
    return impurity;
}

}  // namespace detail

struct ForestModel {
    std::vector<std::string> feature_names;
    std::vector<int> classes;  // sorted merged cluster ids
    std::vector<detail::Tree> trees;
    std::size_t n_trees = 50;
    std::size_t max_depth = 25;
    std::uint64_t seed = 0;

    std::size_t class_index(int label) const {
        const auto it = std::lower_bound(classes.begin(), classes.end(), label);
        return it != classes.end() && *it == label
                   ? static_cast<std::size_t>(it - classes.begin())
                   : classes.size();
    }
};

namespace detail {

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& ts, const std::vector<std::size_t>& class_of_row,
                std::size_t n_classes, std::size_t max_depth, std::size_t features_per_split,
                Rng& rng)
        : ts_(ts), class_of_row_(class_of_row), n_classes_(n_classes), max_depth_(max_depth),
          features_per_split_(features_per_split), rng_(rng) {}

    Tree build(const std::vector<std::size_t>& sample_rows) {
        Tree tree;
        grow(tree, sample_rows, 0);
        return tree;
    }

private:
    int grow(Tree& tree, const std::vector<std::size_t>& rows, std::size_t depth) {
        std::vector<std::size_t> counts(n_classes_, 0);
        for (std::size_t r : rows) ++counts[class_of_row_[r]];
        const double parent_gini = gini(counts, rows.size());

        int best_feature = -1;
        double best_gain = 0.0;
        if (parent_gini > 0.0 && depth < max_depth_) {
            auto candidate_idx =
                rng_.sample_without_replacement(ts_.feature_names.size(), features_per_split_);
            std::sort(candidate_idx.begin(), candidate_idx.end());
            for (std::size_t f : candidate_idx) {
                std::vector<std::size_t> c0(n_classes_, 0), c1(n_classes_, 0);
                std::size_t n1 = 0;
                for (std::size_t r : rows) {
                    if (ts_.rows[r][f]) {
                        ++c1[class_of_row_[r]];
                        ++n1;
                    } else {
                        ++c0[class_of_row_[r]];
                    }
                }
                const std::size_t n0 = rows.size() - n1;
                if (n0 == 0 || n1 == 0) continue;
                const double w0 = static_cast<double>(n0) / static_cast<double>(rows.size());
                const double w1 = static_cast<double>(n1) / static_cast<double>(rows.size());
                const double gain = parent_gini - w0 * gini(c0, n0) - w1 * gini(c1, n1);
                if (gain > best_gain) {  // ties keep the lowest feature index
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                }
            }
        }

        if (best_feature < 0) {
            TreeNode leaf;
            leaf.dist.assign(n_classes_, 0.0);
            for (std::size_t c = 0; c < n_classes_; ++c) {
                leaf.dist[c] = static_cast<double>(counts[c]) / static_cast<double>(rows.size());
            }
            tree.nodes.push_back(std::move(leaf));
            return static_cast<int>(tree.nodes.size() - 1);
        }

        std::vector<std::size_t> rows0, rows1;
        for (std::size_t r : rows) {
            (ts_.rows[r][static_cast<std::size_t>(best_feature)] ? rows1 : rows0).push_back(r);
        }
        const int node_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_idx].feature = best_feature;
        const int c0 = grow(tree, rows0, depth + 1);
        const int c1 = grow(tree, rows1, depth + 1);
        tree.nodes[node_idx].child0 = c0;
        tree.nodes[node_idx].child1 = c1;
        return node_idx;
    }

    const TrainingSet& ts_;
    const std::vector<std::size_t>& class_of_row_;
    std::size_t n_classes_;
    std::size_t max_depth_;
    std::size_t features_per_split_;
    Rng& rng_;
};

}  // namespace detail

// Trains the forest: per tree, a seeded bootstrap sample of rows and
// ceil(sqrt(|features|)) random candidate features per split, gini gain,
// stop at pure node / max depth / no positive gain. Rows are canonically
// sorted by outage id before bootstrap draws, so training is invariant to
// input row order for a fixed seed.
inline ForestModel train_forest(const TrainingSet& ts, std::size_t n_trees = 50,
                                std::size_t max_depth = 25, std::uint64_t seed = 0) {
    if (ts.rows.empty()) throw InvalidArgument("train_forest: empty training set");
    if (ts.feature_names.empty()) throw InvalidArgument("train_forest: no features");
    const std::set<int> distinct(ts.labels.begin(), ts.labels.end());
    if (distinct.size() < 2) {
        throw InvalidArgument("train_forest: need at least 2 distinct labels");
    }

    ForestModel model;
    model.feature_names = ts.feature_names;
    model.classes.assign(distinct.begin(), distinct.end());
    model.n_trees = n_trees;
    model.max_depth = max_depth;
    model.seed = seed;

    // canonical row order
    std::vector<std::size_t> order(ts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&ts](std::size_t a, std::size_t b) {
        return ts.row_ids[a] != ts.row_ids[b] ? ts.row_ids[a] < ts.row_ids[b] : a < b;
    });
    std::vector<std::size_t> class_of_row(ts.size());
    for (std::size_t r = 0; r < ts.size(); ++r) {
        class_of_row[r] = model.class_index(ts.labels[r]);
    }
    const std::size_t features_per_split = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(ts.feature_names.size()))));

    Rng master(seed);
    std::vector<Rng> tree_rngs;
    tree_rngs.reserve(n_trees);
    for (std::size_t i = 0; i < n_trees; ++i) tree_rngs.push_back(master.fork(i));

    for (std::size_t i = 0; i < n_trees; ++i) {
        Rng& rng = tree_rngs[i];
        std::vector<std::size_t> sample;
        sample.reserve(ts.size());
        for (std::size_t d = 0; d < ts.size(); ++d) {
            sample.push_back(order[static_cast<std::size_t>(rng.next_below(ts.size()))]);
        }
        detail::TreeBuilder builder(ts, class_of_row, model.classes.size(), max_depth,
                                    features_per_split, rng);
        model.trees.push_back(builder.build(sample));
    }
    return model;
}

// Average of the leaf class distributions across trees; sums to 1.
inline std::vector<double> predict_proba(const ForestModel& model,
                                         const std::vector<std::uint8_t>& x) {
    if (x.size() != model.feature_names.size()) {
        throw InvalidArgument("predict_proba: feature vector has wrong dimension");
    }
    std::vector<double> probs(model.classes.size(), 0.0);
    for (const auto& tree : model.trees) {
        const auto& dist = tree.leaf_for(x);
        for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += dist[c];
    }
    for (auto& p : probs) p /= static_cast<double>(model.trees.size());
    return probs;
}

// Indicator vector over the model's feature universe; unknown ids are
// ignored (optionally reported).
inline std::vector<std::uint8_t> indicator_vector(const ForestModel& model,
                                                  const std::set<std::string>& fired,
                                                  std::vector<std::string>* unknown = nullptr) {
    std::vector<std::uint8_t> x(model.feature_names.size(), 0);
    for (const auto& id : fired) {
        const auto it =
            std::lower_bound(model.feature_names.begin(), model.feature_names.end(), id);
        if (it != model.feature_names.end() && *it == id) {
            x[static_cast<std::size_t>(it - model.feature_names.begin())] = 1;
        } else if (unknown) {
            unknown->push_back(id);
        }
    }
    return x;
}

// Fraction of test rows whose true label ranks among the K most probable
// classes; ties between equal probabilities go to the smaller class id.
inline double top_k_precision(const ForestModel& model, const TrainingSet& test, std::size_t k) {
    if (k < 1) throw InvalidArgument("top_k_precision: k must be >= 1");
    if (test.rows.empty()) throw InvalidArgument("top_k_precision: empty test set");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < test.size(); ++r) {
        const auto probs = predict_proba(model, test.rows[r]);
        std::vector<std::size_t> rank(model.classes.size());
        std::iota(rank.begin(), rank.end(), 0);
        std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
            if (probs[a] != probs[b]) return probs[a] > probs[b];
            return model.classes[a] < model.classes[b];
        });
        const std::size_t true_idx = model.class_index(test.labels[r]);
        for (std::size_t i = 0; i < std::min(k, rank.size()); ++i) {
            if (rank[i] == true_idx) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

// Seeded, non-stratified train/test split; the test side gets
// floor(n * test_fraction) rows.
inline std::pair<TrainingSet, TrainingSet> train_test_split(const TrainingSet& ts,
                                                            double test_fraction,
                                                            std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0) {
        throw InvalidArgument("train_test_split: test_fraction must be in [0, 1)");
    }
    std::vector<std::size_t> idx(ts.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    const std::size_t n_test =
        static_cast<std::size_t>(std::floor(static_cast<double>(ts.size()) * test_fraction));
    TrainingSet train, test;
    train.feature_names = test.feature_names = ts.feature_names;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        TrainingSet& dst = i < n_test ? test : train;
        dst.row_ids.push_back(ts.row_ids[idx[i]]);
        dst.rows.push_back(ts.rows[idx[i]]);
        dst.labels.push_back(ts.labels[idx[i]]);
    }
    return {std::move(train), std::move(test)};
}

inline nlohmann::json forest_to_json(const ForestModel& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes) {
            if (n.feature < 0) {
                nodes.push_back({{"dist", n.dist}});
            } else {
                nodes.push_back({{"feature", n.feature}, {"child0", n.child0}, {"child1", n.child1}});
            }
        }
        trees.push_back({{"nodes", nodes}});
    }
    return {{"version", kForestFormatVersion},
            {"feature_names", model.feature_names},
            {"classes", model.classes},
            {"n_trees", model.n_trees},
            {"max_depth", model.max_depth},
            {"seed", model.seed},
            {"trees", trees}};
}

inline ForestModel forest_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("version")) throw FormatError("not a forest model document");
    const std::string version = j.at("version").get<std::string>();
    if (version != kForestFormatVersion) {
        throw VersionError("unsupported forest model version '" + version + "'");
    }
    ForestModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.classes = j.at("classes").get<std::vector<int>>();
    model.n_trees = j.at("n_trees").get<std::size_t>();
    model.max_depth = j.at("max_depth").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& tj : j.at("trees")) {
        detail::Tree tree;
        for (const auto& nj : tj.at("nodes")) {
            detail::TreeNode n;
            if (nj.contains("feature")) {
                n.feature = nj.at("feature").get<int>();
                n.child0 = nj.at("child0").get<int>();
                n.child1 = nj.at("child1").get<int>();
            } else {
                n.dist = nj.at("dist").get<std::vector<double>>();
            }
            tree.nodes.push_back(std::move(n));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

inline void save_forest(const ForestModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write forest model to '" + path + "'");
    out << forest_to_json(model).dump(2) << '\n';
}

inline ForestModel load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read forest model from '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError("corrupted forest model document '" + path + "': " + e.what());
    }
    return forest_from_json(j);
}

}  // namespace ckdiag
