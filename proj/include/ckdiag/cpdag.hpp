#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckdiag/error.hpp"

namespace ckdiag {

// Unordered node pair with a canonical (sorted) order.
inline std::pair<std::string, std::string> unordered_pair(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

// Completed partially directed acyclic graph over alert ids. Directed and
// undirected edge sets are disjoint; the directed part is acyclic.
struct Cpdag {
    std::vector<std::string> nodes;  // sorted
    std::set<std::pair<std::string, std::string>> directed_edges;    // a -> b
    std::set<std::pair<std::string, std::string>> undirected_edges;  // canonical order

    bool has_node(const std::string& n) const {
        return std::binary_search(nodes.begin(), nodes.end(), n);
    }
    bool has_directed(const std::string& a, const std::string& b) const {
        return directed_edges.count({a, b}) > 0;
    }
    bool has_undirected(const std::string& a, const std::string& b) const {
        return undirected_edges.count(unordered_pair(a, b)) > 0;
    }
    bool adjacent(const std::string& a, const std::string& b) const {
        return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
    }

    std::size_t edge_count() const { return directed_edges.size() + undirected_edges.size(); }

    // Nodes reachable in one traversal step: directed edges followed
    // forward, undirected edges in either direction.
    std::vector<std::string> traversal_neighbors(const std::string& n) const {
        std::set<std::string> out;
        for (const auto& [a, b] : directed_edges) {
            if (a == n) out.insert(b);
        }
        for (const auto& [a, b] : undirected_edges) {
            if (a == n) out.insert(b);
            if (b == n) out.insert(a);
        }
        return {out.begin(), out.end()};
    }

    // True iff the directed subgraph has no cycle.
    bool directed_part_acyclic() const {
        std::map<std::string, std::vector<std::string>> children;
        std::map<std::string, int> indegree;
        for (const auto& n : nodes) indegree[n] = 0;
        for (const auto& [a, b] : directed_edges) {
            children[a].push_back(b);
            ++indegree[b];
        }
        std::vector<std::string> queue;
        for (const auto& [n, deg] : indegree) {
            if (deg == 0) queue.push_back(n);
        }
        std::size_t seen = 0;
        while (!queue.empty()) {
            const std::string n = queue.back();
            queue.pop_back();
            ++seen;
            for (const auto& c : children[n]) {
                if (--indegree[c] == 0) queue.push_back(c);
            }
        }
        return seen == nodes.size();
    }

    void validate() const {
        for (const auto& [a, b] : directed_edges) {
            if (a == b) throw InvalidArgument("cpdag: self-loop on '" + a + "'");
            if (has_undirected(a, b)) {
                throw InvalidArgument("cpdag: edge '" + a + "'-'" + b +
                                      "' is both directed and undirected");
            }
        }
        for (const auto& [a, b] : undirected_edges) {
            if (a == b) throw InvalidArgument("cpdag: self-loop on '" + a + "'");
        }
        if (!directed_part_acyclic()) throw InvalidArgument("cpdag: directed part has a cycle");
    }

    bool operator==(const Cpdag& other) const {
        return nodes == other.nodes && directed_edges == other.directed_edges &&
               undirected_edges == other.undirected_edges;
    }
};

inline nlohmann::json cpdag_to_json(const Cpdag& g) {
    nlohmann::json directed = nlohmann::json::array();
    for (const auto& [a, b] : g.directed_edges) directed.push_back({a, b});
    nlohmann::json undirected = nlohmann::json::array();
    for (const auto& [a, b] : g.undirected_edges) undirected.push_back({a, b});
    return {{"nodes", g.nodes}, {"directed", directed}, {"undirected", undirected}};
}

inline Cpdag cpdag_from_json(const nlohmann::json& j) {
    Cpdag g;
    g.nodes = j.at("nodes").get<std::vector<std::string>>();
    std::sort(g.nodes.begin(), g.nodes.end());
    for (const auto& e : j.at("directed")) {
        g.directed_edges.emplace(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
    for (const auto& e : j.at("undirected")) {
        g.undirected_edges.insert(unordered_pair(e.at(0).get<std::string>(), e.at(1).get<std::string>()));
    }
    g.validate();
    return g;
}

// Separating sets recorded by the skeleton phase: for each removed edge
// {x, y}, the conditioning set under which x and y tested independent.
using SepsetTable = std::map<std::pair<std::string, std::string>, std::set<std::string>>;

}  // namespace ckdiag
