#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "ckdiag/error.hpp"
#include "ckdiag/text.hpp"
#include "ckdiag/time.hpp"

namespace ckdiag {

// Every knob of the graph-construction and inference pipeline, with the
// defaults the system ships with.
struct PipelineConfig {
    std::int64_t t_minutes = 15;          // indicator window duration
    std::size_t min_fires = 10;           // column filter threshold
    double row_drop_fraction = 0.95;      // share of all-zero rows dropped
    std::int64_t pre_window_minutes = 60; // outage lookback for linking
    double alpha = 0.05;                  // CI test significance
    std::size_t max_cond = 3;             // PC conditioning-set cap
    double cluster_tolerance = 0.05;      // silhouette band for K selection
    std::size_t k_max_cap = 150;          // upper bound on candidate K
    std::size_t k_hops = 9;               // traversal hop budget
    std::size_t top_l = 3;                // clusters kept by clust inference
    std::size_t top_n = 5;                // recommendations returned
    std::size_t forest_trees = 50;
    std::size_t forest_depth = 25;
    std::uint64_t seed = 0;
    TextConfig text;
    std::optional<TimeRange> period;      // defaults to the log span

    Seconds pre_window() const { return minutes(pre_window_minutes); }

    void validate() const {
        if (t_minutes <= 0) throw ConfigError("t_minutes", "must be positive");
        if (min_fires < 1) throw ConfigError("min_fires", "must be >= 1");
        if (row_drop_fraction < 0.0 || row_drop_fraction >= 1.0) {
            throw ConfigError("row_drop_fraction", "must be in [0, 1)");
        }
        if (pre_window_minutes < 0) throw ConfigError("pre_window_minutes", "must be >= 0");
        if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("alpha", "must be in (0, 1)");
        if (cluster_tolerance < 0.0 || cluster_tolerance >= 1.0) {
            throw ConfigError("cluster_tolerance", "must be in [0, 1)");
        }
        if (k_max_cap < 2) throw ConfigError("k_max_cap", "must be >= 2");
        if (k_hops < 1) throw ConfigError("k_hops", "must be >= 1");
        if (top_l < 1) throw ConfigError("top_l", "must be >= 1");
        if (top_n < 1) throw ConfigError("top_n", "must be >= 1");
        if (forest_trees < 1) throw ConfigError("forest_trees", "must be >= 1");
        if (text.embedding_dim < 1) throw ConfigError("text.embedding_dim", "must be >= 1");
        if (text.max_sentences < 1) throw ConfigError("text.max_sentences", "must be >= 1");
        if (period && period->empty()) throw ConfigError("period", "start must precede end");
    }
};

namespace detail {

template <typename T>
T config_field(const nlohmann::json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError(path.empty() ? key : path + "." + key, "has the wrong type");
    }
}

}  // namespace detail

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("", "config document must be an object");
    PipelineConfig c;
    c.t_minutes = detail::config_field(j, "", "t_minutes", c.t_minutes);
    c.min_fires = detail::config_field(j, "", "min_fires", c.min_fires);
    c.row_drop_fraction = detail::config_field(j, "", "row_drop_fraction", c.row_drop_fraction);
    c.pre_window_minutes = detail::config_field(j, "", "pre_window_minutes", c.pre_window_minutes);
    c.alpha = detail::config_field(j, "", "alpha", c.alpha);
    c.max_cond = detail::config_field(j, "", "max_cond", c.max_cond);
    c.cluster_tolerance = detail::config_field(j, "", "cluster_tolerance", c.cluster_tolerance);
    c.k_max_cap = detail::config_field(j, "", "k_max_cap", c.k_max_cap);
    c.k_hops = detail::config_field(j, "", "k_hops", c.k_hops);
    c.top_l = detail::config_field(j, "", "top_l", c.top_l);
    c.top_n = detail::config_field(j, "", "top_n", c.top_n);
    c.forest_trees = detail::config_field(j, "", "forest_trees", c.forest_trees);
    c.forest_depth = detail::config_field(j, "", "forest_depth", c.forest_depth);
    c.seed = detail::config_field(j, "", "seed", c.seed);
    if (j.contains("text")) {
        const auto& t = j.at("text");
        if (!t.is_object()) throw ConfigError("text", "must be an object");
        c.text.embedding_dim = detail::config_field(t, "text", "embedding_dim", c.text.embedding_dim);
        c.text.max_sentences = detail::config_field(t, "text", "max_sentences", c.text.max_sentences);
        c.text.max_summary_tokens =
            detail::config_field(t, "text", "max_summary_tokens", c.text.max_summary_tokens);
        c.text.external_base_url =
            detail::config_field(t, "text", "external_base_url", c.text.external_base_url);
        c.text.external_timeout_ms =
            detail::config_field(t, "text", "external_timeout_ms", c.text.external_timeout_ms);
        c.text.external_max_in_flight =
            detail::config_field(t, "text", "external_max_in_flight", c.text.external_max_in_flight);
    }
    if (j.contains("period")) {
        const auto& p = j.at("period");
        if (!p.is_object() || !p.contains("start") || !p.contains("end")) {
            throw ConfigError("period", "must be an object with 'start' and 'end'");
        }
        TimeRange r;
        try {
            r.start = parse_rfc3339(p.at("start").get<std::string>());
        } catch (const std::exception&) {
            throw ConfigError("period.start", "must be an RFC 3339 timestamp");
        }
        try {
            r.end = parse_rfc3339(p.at("end").get<std::string>());
        } catch (const std::exception&) {
            throw ConfigError("period.end", "must be an RFC 3339 timestamp");
        }
        c.period = r;
    }
    c.validate();
    return c;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("", std::string("not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace ckdiag
