#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ckdiag/alerts.hpp"
#include "ckdiag/ck_graph.hpp"
#include "ckdiag/config.hpp"
#include "ckdiag/indicator.hpp"
#include "ckdiag/knowledge_graph.hpp"
#include "ckdiag/pc.hpp"
#include "ckdiag/random_forest.hpp"
#include "ckdiag/text.hpp"

namespace ckdiag {

// Inclusive span of alert time excluded from a build (leave-one-out folds).
struct ExcludedSpan {
    Timestamp lo = 0;
    Timestamp hi = 0;  // inclusive
};

struct PipelineBuild {
    CkGraph graph;
    IndicatorMatrix matrix;  // the filtered matrix the CPDAG was learned from
    AlertLog working_log;    // the log after span exclusion
    std::vector<std::string> warnings;
};

// Runs the full graph-construction phase: indicator matrix, column/row
// filters, PC discovery, knowledge graph with clustering, and the temporal
// merge. When `exclude` is set, alert firings inside the span are dropped
// and indicator rows overlapping it are removed outright.
inline PipelineBuild build_pipeline(const AlertLog& log,
                                    const std::vector<OutageReport>& reports,
                                    const PipelineConfig& cfg, const TextProvider& provider,
                                    const ExcludedSpan* exclude = nullptr) {
    cfg.validate();
    if (reports.empty()) throw InvalidArgument("build_pipeline: no outage reports");
    PipelineBuild out;

    AlertLog working = log;
    if (exclude) {
        AlertLog filtered;
        for (const auto& a : working.alerts) {
            if (a.fired_at >= exclude->lo && a.fired_at <= exclude->hi) continue;
            filtered.alerts.push_back(a);
        }
        working = std::move(filtered);
    }

    const TimeRange period = cfg.period ? *cfg.period : working.span();
    IndicatorMatrix m = build_indicator_matrix(working, cfg.t_minutes, period, &out.warnings);
    if (exclude) {
        const Seconds t = minutes(m.window_duration);
        IndicatorMatrix kept;
        kept.window_duration = m.window_duration;
        kept.alert_ids = m.alert_ids;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const Timestamp w = m.window_start_times[r];
            if (w <= exclude->hi && w + t > exclude->lo) continue;
            kept.window_start_times.push_back(w);
            for (std::size_t c = 0; c < m.cols(); ++c) kept.cells.push_back(m.at(r, c));
        }
        m = std::move(kept);
    }
    m = filter_columns(m, reports, cfg.min_fires, cfg.pre_window());
    m = filter_rows(m, cfg.row_drop_fraction, cfg.seed);

    auto [cpdag, sepsets] = discover(m, cfg.alpha, cfg.max_cond);
    KnowledgeGraph kg = build_kg(reports, provider);
    ClusterAssignment clusters = cluster_outages(kg, cfg.k_max_cap, cfg.cluster_tolerance);

    out.graph = link_alerts_to_symptoms(std::move(cpdag), std::move(kg), std::move(clusters),
                                        working, reports, cfg.pre_window(), &out.warnings);
    out.graph.metadata.period = period;
    out.graph.metadata.t_minutes = cfg.t_minutes;
    out.graph.metadata.alpha = cfg.alpha;
    out.graph.metadata.max_cond = cfg.max_cond;
    out.graph.metadata.seed = cfg.seed;
    out.graph.metadata.pre_window = cfg.pre_window();
    out.graph.metadata.provider_kind = cfg.text.uses_external() ? "external" : "hashing";
    out.graph.metadata.embedding_dim = cfg.text.embedding_dim;
    out.graph.metadata.max_sentences = cfg.text.max_sentences;
    out.matrix = std::move(m);
    out.working_log = std::move(working);
    return out;
}

// Trains the outage cluster predictor against an already-built graph.
inline ForestModel train_predictor(const CkGraph& ck, const AlertLog& log,
                                   const std::vector<OutageReport>& reports,
                                   const PipelineConfig& cfg,
                                   std::vector<std::string>* warnings = nullptr) {
    const TrainingSet ts = build_training_set(ck, log, reports, warnings);
    return train_forest(ts, cfg.forest_trees, cfg.forest_depth, cfg.seed);
}

}  // namespace ckdiag
