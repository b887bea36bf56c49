#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ckdiag/cpdag.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/indicator.hpp"
#include "ckdiag/math.hpp"

namespace ckdiag {

struct CiTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
    int df = 0;
    bool degenerate = false;  // x or y constant over all rows
};

namespace detail {

// 2x2 chi-square contribution of one stratum. Strata with a zero marginal
// contribute nothing (0 statistic, 0 df).
struct StratumCounts {
    double n[2][2] = {{0, 0}, {0, 0}};

    bool contributes() const {
        const double r0 = n[0][0] + n[0][1], r1 = n[1][0] + n[1][1];
        const double c0 = n[0][0] + n[1][0], c1 = n[0][1] + n[1][1];
        return r0 > 0 && r1 > 0 && c0 > 0 && c1 > 0;
    }

    double chi_square() const {
        const double r0 = n[0][0] + n[0][1], r1 = n[1][0] + n[1][1];
        const double c0 = n[0][0] + n[1][0], c1 = n[0][1] + n[1][1];
        const double total = r0 + r1;
        double stat = 0.0;
        const double rows[2] = {r0, r1}, cols[2] = {c0, c1};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double expected = rows[i] * cols[j] / total;
                const double diff = n[i][j] - expected;
                stat += diff * diff / expected;
            }
        }
        return stat;
    }
};

}  // namespace detail

// Conditional-independence test of columns x and y given the columns in S.
// Rows are stratified by each observed configuration of S; per-stratum 2x2
// chi-square statistics are summed, each contributing stratum adding one
// degree of freedom. Independence is declared when the upper-tail p-value
// exceeds alpha.
inline CiTestResult chi_square_ci_test(const IndicatorMatrix& m, std::size_t x, std::size_t y,
                                       const std::vector<std::size_t>& cond, double alpha) {
    if (x == y) throw InvalidArgument("ci test: x and y must differ");
    if (alpha <= 0.0 || alpha >= 1.0) throw InvalidArgument("ci test: alpha must be in (0, 1)");
    for (std::size_t s : cond) {
        if (s == x || s == y) throw InvalidArgument("ci test: conditioning set contains x or y");
    }

    CiTestResult res;
    bool x_varies = false, y_varies = false;
    for (std::size_t r = 1; r < m.rows() && !(x_varies && y_varies); ++r) {
        x_varies = x_varies || m.at(r, x) != m.at(0, x);
        y_varies = y_varies || m.at(r, y) != m.at(0, y);
    }
    if (m.rows() == 0 || !x_varies || !y_varies) {
        res.degenerate = true;
        return res;  // independent, p = 1
    }

    // Stratum key: bits of the conditioning columns.
    std::map<std::uint64_t, detail::StratumCounts> strata;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < cond.size(); ++i) {
            key |= static_cast<std::uint64_t>(m.at(r, cond[i])) << i;
        }
        strata[key].n[m.at(r, x)][m.at(r, y)] += 1.0;
    }

    for (const auto& [key, counts] : strata) {
        if (!counts.contributes()) continue;
        res.statistic += counts.chi_square();
        res.df += 1;
    }
    if (res.df == 0) {
        res.p_value = 1.0;
        res.independent = true;
        return res;
    }
    res.p_value = chi_square_sf(res.statistic, res.df);
    res.independent = res.p_value > alpha;
    return res;
}

// Name-based convenience overload.
inline CiTestResult chi_square_ci_test(const IndicatorMatrix& m, const std::string& x,
                                       const std::string& y, const std::set<std::string>& cond,
                                       double alpha) {
    auto col = [&m](const std::string& id) -> std::size_t {
        const auto it = std::find(m.alert_ids.begin(), m.alert_ids.end(), id);
        if (it == m.alert_ids.end()) throw InvalidArgument("ci test: unknown alert '" + id + "'");
        return static_cast<std::size_t>(it - m.alert_ids.begin());
    };
    std::vector<std::size_t> cond_idx;
    for (const auto& s : cond) cond_idx.push_back(col(s));
    return chi_square_ci_test(m, col(x), col(y), cond_idx, alpha);
}

struct Skeleton {
    std::vector<std::string> nodes;  // sorted
    std::set<std::pair<std::string, std::string>> edges;  // canonical pairs
    SepsetTable sepsets;
};

namespace detail {

// Calls fn(subset) for every size-k subset of the sorted candidate list, in
// lexicographic order, until fn returns true. Returns whether fn fired.
template <typename Fn>
inline bool for_each_subset(const std::vector<std::size_t>& candidates, std::size_t k, Fn&& fn) {
    if (k > candidates.size()) return false;
    std::vector<std::size_t> pick(k);
    // classic combination enumeration over indices into `candidates`
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) pick[i] = candidates[idx[i]];
        if (fn(pick)) return true;
        if (k == 0) return false;
        // advance
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (idx[i] != i + candidates.size() - k) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return false;
        }
    }
}

}  // namespace detail

// PC skeleton phase. Starts from the complete graph; for conditioning-set
// cardinality 0..max_cond, visits remaining edges in lexicographic order and
// tests subsets drawn from the current adjacencies of x, then of y. The
// first independence removes the edge and records the separating set.
inline Skeleton pc_skeleton(const IndicatorMatrix& m, double alpha, std::size_t max_cond) {
    if (m.cols() < 2) {
        Skeleton s;
        s.nodes = m.alert_ids;
        std::sort(s.nodes.begin(), s.nodes.end());
        return s;
    }

    // Column visit order is lexicographic by alert id.
    std::vector<std::size_t> order(m.cols());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&m](std::size_t a, std::size_t b) { return m.alert_ids[a] < m.alert_ids[b]; });
    std::vector<std::size_t> rank(m.cols());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    const std::size_t n = m.cols();
    std::vector<std::set<std::size_t>> adj(n);  // keyed by rank
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }

    Skeleton skel;
    for (std::size_t i = 0; i < n; ++i) skel.nodes.push_back(m.alert_ids[order[i]]);

    for (std::size_t level = 0; level <= max_cond; ++level) {
        bool any_testable = false;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j : adj[i]) {
                if (j > i) edges.emplace_back(i, j);
            }
        }
        for (const auto& [x, y] : edges) {
            if (!adj[x].count(y)) continue;  // removed earlier at this level
            bool removed = false;
            for (const std::size_t side : {x, y}) {
                const std::size_t other = side == x ? y : x;
                std::vector<std::size_t> candidates;
                for (std::size_t nb : adj[side]) {
                    if (nb != other) candidates.push_back(nb);
                }
                if (candidates.size() >= level) any_testable = true;
                removed = detail::for_each_subset(
                    candidates, level, [&](const std::vector<std::size_t>& subset) {
                        std::vector<std::size_t> cond_cols;
                        for (std::size_t s : subset) cond_cols.push_back(order[s]);
                        const auto res =
                            chi_square_ci_test(m, order[x], order[y], cond_cols, alpha);
                        if (!res.independent) return false;
                        adj[x].erase(y);
                        adj[y].erase(x);
                        std::set<std::string> sep;
                        for (std::size_t s : subset) sep.insert(skel.nodes[s]);
                        skel.sepsets[unordered_pair(skel.nodes[x], skel.nodes[y])] = std::move(sep);
                        return true;
                    });
                if (removed) break;
            }
        }
        if (!any_testable) break;  // no edge has enough neighbors for the next level
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : adj[i]) {
            if (j > i) skel.edges.insert(unordered_pair(skel.nodes[i], skel.nodes[j]));
        }
    }
    return skel;
}

// Orients unshielded colliders: for each triple x - z - y with x, y
// non-adjacent and z outside sepset(x, y), demand x -> z <- y. An edge with
// both directions demanded stays undirected.
inline Cpdag orient_colliders(const Skeleton& skel) {
    Cpdag g;
    g.nodes = skel.nodes;
    g.undirected_edges = skel.edges;

    std::set<std::pair<std::string, std::string>> demands;
    for (const auto& z : g.nodes) {
        std::vector<std::string> nbs;
        for (const auto& e : skel.edges) {
            if (e.first == z) nbs.push_back(e.second);
            if (e.second == z) nbs.push_back(e.first);
        }
        std::sort(nbs.begin(), nbs.end());
        for (std::size_t i = 0; i < nbs.size(); ++i) {
            for (std::size_t j = i + 1; j < nbs.size(); ++j) {
                const auto& x = nbs[i];
                const auto& y = nbs[j];
                if (skel.edges.count(unordered_pair(x, y))) continue;  // shielded
                const auto it = skel.sepsets.find(unordered_pair(x, y));
                if (it == skel.sepsets.end()) continue;
                if (it->second.count(z)) continue;
                demands.emplace(x, z);
                demands.emplace(y, z);
            }
        }
    }
    for (const auto& [a, b] : demands) {
        if (demands.count({b, a})) continue;  // conflicting collider, stays undirected
        const auto key = unordered_pair(a, b);
        if (g.undirected_edges.erase(key)) g.directed_edges.emplace(a, b);
    }
    return g;
}

namespace detail {

inline bool orient(Cpdag& g, const std::string& a, const std::string& b) {
    const auto key = unordered_pair(a, b);
    if (!g.undirected_edges.count(key)) return false;
    g.undirected_edges.erase(key);
    g.directed_edges.emplace(a, b);
    return true;
}

// One pass of Meek rules R1-R4 over every undirected edge, in both
// directions. Returns true if anything was oriented.
inline bool meek_pass(Cpdag& g) {
    auto try_orient = [&g](const std::string& a, const std::string& b) -> bool {
        // R1: c -> a, a - b, c and b non-adjacent  =>  a -> b
        for (const auto& [c, a2] : g.directed_edges) {
            if (a2 != a) continue;
            if (!g.adjacent(c, b)) return orient(g, a, b);
        }
        // R2: a -> c -> b with a - b  =>  a -> b
        for (const auto& [a2, c] : g.directed_edges) {
            if (a2 != a) continue;
            if (g.has_directed(c, b)) return orient(g, a, b);
        }
        // R3: a - c -> b, a - d -> b, c and d non-adjacent  =>  a -> b
        std::vector<std::string> into_b;
        for (const auto& [c, b2] : g.directed_edges) {
            if (b2 == b && g.has_undirected(a, c)) into_b.push_back(c);
        }
        for (std::size_t i = 0; i < into_b.size(); ++i) {
            for (std::size_t j = i + 1; j < into_b.size(); ++j) {
                if (!g.adjacent(into_b[i], into_b[j])) return orient(g, a, b);
            }
        }
        // R4: z -> w -> b with a adjacent to both z and w, z and b
        // non-adjacent  =>  a -> b
        for (const auto& [w, b2] : g.directed_edges) {
            if (b2 != b || !g.adjacent(a, w)) continue;
            for (const auto& [z, w2] : g.directed_edges) {
                if (w2 != w || !g.adjacent(a, z)) continue;
                if (!g.adjacent(z, b)) return orient(g, a, b);
            }
        }
        return false;
    };

    // Snapshot: orientation invalidates iterators over the live set.
    const auto edges = g.undirected_edges;
    bool changed = false;
    for (const auto& [a, b] : edges) {
        if (!g.undirected_edges.count(unordered_pair(a, b))) continue;
        if (try_orient(a, b) || try_orient(b, a)) changed = true;
    }
    return changed;
}

}  // namespace detail

// Applies Meek rules R1-R4 to a fixed point.
inline Cpdag apply_meek_rules(Cpdag g) {
    while (detail::meek_pass(g)) {
    }
    g.validate();
    return g;
}

// Full PC run: skeleton, collider orientation, Meek closure.
inline std::pair<Cpdag, SepsetTable> discover(const IndicatorMatrix& m, double alpha = 0.05,
                                              std::size_t max_cond = 3) {
    Skeleton skel = pc_skeleton(m, alpha, max_cond);
    Cpdag g = apply_meek_rules(orient_colliders(skel));
    return {std::move(g), std::move(skel.sepsets)};
}

}  // namespace ckdiag
