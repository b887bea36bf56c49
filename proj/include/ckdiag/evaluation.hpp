#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdiag/alerts.hpp"
#include "ckdiag/inference.hpp"
#include "ckdiag/pipeline.hpp"
#include "ckdiag/rouge.hpp"

namespace ckdiag {

enum class EvalMethod { path, sim, clust, incident_search };

inline std::string to_string(EvalMethod m) {
    switch (m) {
        case EvalMethod::path: return "path";
        case EvalMethod::sim: return "sim";
        case EvalMethod::clust: return "clust";
        case EvalMethod::incident_search: return "incident_search";
    }
    return "clust";
}

inline EvalMethod eval_method_from_string(const std::string& s) {
    if (s == "path") return EvalMethod::path;
    if (s == "sim") return EvalMethod::sim;
    if (s == "clust") return EvalMethod::clust;
    if (s == "incident_search") return EvalMethod::incident_search;
    throw InvalidArgument("unknown inference method '" + s + "'");
}

// Nearest-neighbor search over stored symptom embeddings. The query symptom
// is summarized with the same provider before embedding, so a query equal to
// a stored report's symptom lands exactly on its embedding.
inline std::vector<Recommendation> incident_search_baseline(const CkGraph& ck,
                                                            const std::string& symptom_text,
                                                            const TextProvider& provider,
                                                            std::size_t top_k = 5) {
    if (ck.kg.entries.empty()) throw InvalidArgument("incident search: empty corpus");
    const EmbeddingVector query = provider.embed_text(provider.summarize(symptom_text).text);
    if (query.degenerate) throw InvalidArgument("incident search: degenerate query embedding");
    auto recs = detail::rank_by_similarity(ck, query, nullptr, "incident_search");
    detail::finalize(recs, top_k);
    return recs;
}

inline std::vector<Recommendation> incident_search_baseline(
    const std::vector<OutageReport>& corpus, const std::string& symptom_text,
    const TextProvider& provider, std::size_t top_k = 5) {
    if (corpus.empty()) throw InvalidArgument("incident search: empty corpus");
    CkGraph ck;
    ck.kg = build_kg(corpus, provider);
    return incident_search_baseline(ck, symptom_text, provider, top_k);
}

// Best Rouge over the top-k recommendations for one held-out outage.
struct OutageEvalScores {
    std::string outage_id;
    RougeScore rc_rouge1, rc_rougeL;    // root cause
    RougeScore rem_rouge1, rem_rougeL;  // remediation
    std::vector<std::string> top_outage_ids;
    bool no_fired_alerts = false;   // query was empty: scored as a miss
    bool predictor_skipped = false; // fold corpus had a single cluster
};

struct EvalReport {
    std::string method;
    std::size_t top_k = 5;
    std::size_t sample_size = 0;
    std::uint64_t seed = 0;
    std::vector<OutageEvalScores> per_outage;
    double avg_rc_rouge1_f1 = 0.0;
    double avg_rc_rougeL_f1 = 0.0;
    double avg_rem_rouge1_f1 = 0.0;
    double avg_rem_rougeL_f1 = 0.0;
};

namespace detail {

inline void assert_no_leakage(const PipelineBuild& build, const OutageReport& held,
                              const ExcludedSpan& span) {
    if (build.graph.kg.find(held.outage_id)) {
        throw Error("leakage: held-out report '" + held.outage_id + "' present in rebuilt graph");
    }
    if (build.graph.clusters.merged.count(held.outage_id)) {
        throw Error("leakage: held-out outage '" + held.outage_id + "' has a cluster label");
    }
    for (const auto& [alert, outages] : build.graph.caused_outage) {
        if (outages.count(held.outage_id)) {
            throw Error("leakage: caused_outage edge to held-out outage '" + held.outage_id + "'");
        }
    }
    const Seconds t = minutes(build.matrix.window_duration);
    for (const Timestamp w : build.matrix.window_start_times) {
        if (w <= span.hi && w + t > span.lo) {
            throw Error("leakage: indicator row at " + format_rfc3339(w) +
                        " overlaps the held-out window");
        }
    }
}

inline RougeScore best_rouge(const std::vector<Recommendation>& recs, const std::string& truth,
                             bool remediation, RougeVariant variant) {
    RougeScore best;
    best.variant = variant;
    for (const auto& r : recs) {
        const std::string& cand = remediation ? r.remediation_summary : r.root_cause_summary;
        const RougeScore s = variant == RougeVariant::rouge1 ? rouge_1(cand, truth)
                                                             : rouge_l(cand, truth);
        if (s.f1 > best.f1) best = s;
    }
    return best;
}

}  // namespace detail

// Leave-one-out evaluation: for each sampled outage the CK graph (and, for
// clust, the predictor) is rebuilt with that outage's report and its
// window's alert firings excluded; the query is the alert set fired in
// [start - pre_window, resolution] of the held-out outage. Scores are the
// max Rouge across the top-k recommendations against the summarized
// held-out texts. Every fold structurally asserts that nothing from the
// held-out outage leaked into the rebuilt graph.
inline EvalReport leave_one_out_eval(const AlertLog& log,
                                     const std::vector<OutageReport>& reports,
                                     const PipelineConfig& cfg, const TextProvider& provider,
                                     EvalMethod method, std::size_t top_k = 5,
                                     std::size_t sample = 50, std::uint64_t seed = 0) {
    if (reports.size() < 2) throw InvalidArgument("leave-one-out needs at least 2 outages");
    EvalReport report;
    report.method = to_string(method);
    report.top_k = top_k;
    report.seed = seed;

    std::vector<std::size_t> picked;
    if (sample >= reports.size()) {
        picked.resize(reports.size());
        std::iota(picked.begin(), picked.end(), 0);
    } else {
        Rng rng(seed);
        picked = rng.sample_without_replacement(reports.size(), sample);
        std::sort(picked.begin(), picked.end());
    }
    report.sample_size = picked.size();

    const auto titles_by_id = log.titles_by_id();
    for (const std::size_t held_idx : picked) {
        const OutageReport& held = reports[held_idx];
        OutageEvalScores scores;
        scores.outage_id = held.outage_id;

        std::vector<OutageReport> fold_reports;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (i != held_idx) fold_reports.push_back(reports[i]);
        }
        const ExcludedSpan span{held.start_time - cfg.pre_window(), held.resolution_time};
        const PipelineBuild build = build_pipeline(log, fold_reports, cfg, provider, &span);
        detail::assert_no_leakage(build, held, span);

        const std::set<std::string> fired = alerts_in_outage_window(log, held, cfg.pre_window());
        InferenceQuery q;
        q.fired_alert_ids = fired;
        for (const auto& id : fired) {
            const auto it = titles_by_id.find(id);
            q.fired_alert_titles.push_back(it != titles_by_id.end() ? it->second : id);
        }
        q.k_hops = cfg.k_hops;
        q.top_l = cfg.top_l;
        q.top_n = top_k;

        std::vector<Recommendation> recs;
        if (method == EvalMethod::incident_search) {
            recs = incident_search_baseline(build.graph, held.symptom_text, provider, top_k);
        } else if (fired.empty()) {
            scores.no_fired_alerts = true;  // zero-score miss
        } else if (method == EvalMethod::path) {
            recs = infer_path(build.graph, q).recommendations;
        } else if (method == EvalMethod::sim) {
            recs = infer_sim(build.graph, q, provider).recommendations;
        } else {
            std::set<int> fold_clusters;
            for (const auto& [id, c] : build.graph.clusters.merged) fold_clusters.insert(c);
            if (fold_clusters.size() >= 2) {
                const ForestModel model =
                    train_predictor(build.graph, build.working_log, fold_reports, cfg, nullptr);
                recs = infer_clust(build.graph, model, q, provider).recommendations;
            } else {
                scores.predictor_skipped = true;
                recs = infer_clust(build.graph, nullptr, q, provider).recommendations;
            }
        }

        const std::string truth_rc = provider.summarize(held.root_cause_text).text;
        const std::string truth_rem = provider.summarize(held.remediation_text).text;
        scores.rc_rouge1 = detail::best_rouge(recs, truth_rc, false, RougeVariant::rouge1);
        scores.rc_rougeL = detail::best_rouge(recs, truth_rc, false, RougeVariant::rougeL);
        scores.rem_rouge1 = detail::best_rouge(recs, truth_rem, true, RougeVariant::rouge1);
        scores.rem_rougeL = detail::best_rouge(recs, truth_rem, true, RougeVariant::rougeL);
        for (const auto& r : recs) scores.top_outage_ids.push_back(r.outage_id);

        report.per_outage.push_back(std::move(scores));
    }

    const double n = static_cast<double>(report.per_outage.size());
    for (const auto& s : report.per_outage) {
        report.avg_rc_rouge1_f1 += s.rc_rouge1.f1 / n;
        report.avg_rc_rougeL_f1 += s.rc_rougeL.f1 / n;
        report.avg_rem_rouge1_f1 += s.rem_rouge1.f1 / n;
        report.avg_rem_rougeL_f1 += s.rem_rougeL.f1 / n;
    }
    return report;
}

namespace detail {

inline nlohmann::json rouge_to_json(const RougeScore& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

}  // namespace detail

inline nlohmann::json eval_report_to_json(const EvalReport& r) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& s : r.per_outage) {
        nlohmann::json j = {{"outage_id", s.outage_id},
                            {"root_cause", {{"rouge1", detail::rouge_to_json(s.rc_rouge1)},
                                            {"rougeL", detail::rouge_to_json(s.rc_rougeL)}}},
                            {"remediation", {{"rouge1", detail::rouge_to_json(s.rem_rouge1)},
                                             {"rougeL", detail::rouge_to_json(s.rem_rougeL)}}},
                            {"top_outage_ids", s.top_outage_ids}};
        if (s.no_fired_alerts) j["no_fired_alerts"] = true;
        if (s.predictor_skipped) j["predictor_skipped"] = true;
        per.push_back(std::move(j));
    }
    return {{"method", r.method},
            {"top_k", r.top_k},
            {"sample_size", r.sample_size},
            {"seed", r.seed},
            {"averages", {{"root_cause_rouge1_f1", r.avg_rc_rouge1_f1},
                          {"root_cause_rougeL_f1", r.avg_rc_rougeL_f1},
                          {"remediation_rouge1_f1", r.avg_rem_rouge1_f1},
                          {"remediation_rougeL_f1", r.avg_rem_rougeL_f1}}},
            {"per_outage", per}};
}

inline std::string eval_report_table(const EvalReport& r) {
    std::ostringstream out;
    out << "method=" << r.method << " top_k=" << r.top_k << " sample=" << r.sample_size
        << " seed=" << r.seed << "\n";
    out << std::left << std::setw(14) << "outage" << std::right << std::setw(10) << "rc R1"
        << std::setw(10) << "rc RL" << std::setw(10) << "rem R1" << std::setw(10) << "rem RL"
        << "\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& s : r.per_outage) {
        out << std::left << std::setw(14) << s.outage_id << std::right << std::setw(10)
            << s.rc_rouge1.f1 << std::setw(10) << s.rc_rougeL.f1 << std::setw(10)
            << s.rem_rouge1.f1 << std::setw(10) << s.rem_rougeL.f1;
        if (s.no_fired_alerts) out << "  (no fired alerts)";
        out << "\n";
    }
    out << std::left << std::setw(14) << "average" << std::right << std::setw(10)
        << r.avg_rc_rouge1_f1 << std::setw(10) << r.avg_rc_rougeL_f1 << std::setw(10)
        << r.avg_rem_rouge1_f1 << std::setw(10) << r.avg_rem_rougeL_f1 << "\n";
    return out.str();
}

}  // namespace ckdiag
