#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "ckdiag/ck_graph.hpp"
#include "ckdiag/config.hpp"
#include "ckdiag/inference.hpp"
#include "ckdiag/random_forest.hpp"
#include "ckdiag/text.hpp"

namespace ckdiag {

// Runs one query against loaded artifacts. This is the single code path
// behind both the CLI `infer` subcommand and POST /v1/infer, so their output
// documents are identical bytes for identical inputs.
inline nlohmann::json run_inference(const CkGraph& graph, const ForestModel* model,
                                    const TextProvider& provider, const std::string& method,
                                    const InferenceQuery& q) {
    InferenceResult result;
    if (method == "path") {
        result = infer_path(graph, q);
    } else if (method == "sim") {
        result = infer_sim(graph, q, provider);
    } else if (method == "clust") {
        if (!model) throw InvalidArgument("method 'clust' requires a trained model");
        result = infer_clust(graph, *model, q, provider);
    } else {
        throw InvalidArgument("unknown inference method '" + method + "'");
    }
    return inference_result_to_json(result, q);
}

// Read-only inference service over a persisted CK graph and forest model.
// Every endpoint replies 503 until load() has installed the artifacts; after
// that the shared state is immutable and requests need no synchronization.
class InferenceService {
public:
    explicit InferenceService(PipelineConfig defaults = {}) : defaults_(std::move(defaults)) {
        install_routes();
    }

    void load(CkGraph graph, std::optional<ForestModel> model, TextProvider provider) {
        graph_ = std::make_shared<CkGraph>(std::move(graph));
        if (model) model_ = std::make_shared<ForestModel>(std::move(*model));
        provider_ = std::make_shared<TextProvider>(std::move(provider));
        loaded_.store(true);
    }

    httplib::Server& server() { return server_; }

    // Blocks until the server is stopped.
    bool serve(const std::string& host, int port) { return server_.listen(host, port); }

private:
    static void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(2) + "\n", "application/json");
    }

    bool require_loaded(httplib::Response& res) const {
        if (loaded_.load()) return true;
        reply_json(res, 503, {{"error", "artifacts not loaded yet"}});
        return false;
    }

    void install_routes() {
        server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            if (!loaded_.load()) {
                reply_json(res, 503, {{"status", "loading"}});
                return;
            }
            reply_json(res, 200, {{"status", "ok"}, {"graph_version", kCkGraphFormatVersion}});
        });

        server_.Get("/v1/graph/summary", [this](const httplib::Request&, httplib::Response& res) {
            if (!require_loaded(res)) return;
            const CkGraph& g = *graph_;
            reply_json(res, 200,
                       {{"alerts", g.cpdag.nodes.size()},
                        {"directed_edges", g.cpdag.directed_edges.size()},
                        {"undirected_edges", g.cpdag.undirected_edges.size()},
                        {"outages", g.kg.size()},
                        {"kg_nodes", g.kg.node_count()},
                        {"kg_edges", g.kg.edge_count()},
                        {"caused_outage_edges", g.caused_outage_edge_count()},
                        {"merged_clusters", g.clusters.k_merged},
                        {"graph_version", kCkGraphFormatVersion}});
        });

        server_.Post("/v1/infer", [this](const httplib::Request& req, httplib::Response& res) {
            if (!require_loaded(res)) return;
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const std::exception&) {
                reply_json(res, 400, {{"error", "request body is not valid JSON"}});
                return;
            }
            if (!body.is_object() || !body.contains("alert_ids") || !body["alert_ids"].is_array()) {
                reply_json(res, 400, {{"error", "body must contain an 'alert_ids' array"}});
                return;
            }
            const std::string method = body.value("method", std::string{"clust"});
            if (method != "path" && method != "sim" && method != "clust") {
                reply_json(res, 422, {{"error", "unknown inference method '" + method + "'"}});
                return;
            }
            if (method == "clust" && !model_) {
                reply_json(res, 422, {{"error", "method 'clust' requires a loaded model"}});
                return;
            }
            InferenceQuery q;
            try {
                for (const auto& id : body["alert_ids"]) {
                    q.fired_alert_ids.insert(id.get<std::string>());
                }
                q.k_hops = body.value("k", defaults_.k_hops);
                q.top_l = body.value("L", defaults_.top_l);
                q.top_n = body.value("top_n", defaults_.top_n);
                q.validate();
            } catch (const std::exception& e) {
                reply_json(res, 400, {{"error", std::string("bad query: ") + e.what()}});
                return;
            }
            try {
                const nlohmann::json out =
                    run_inference(*graph_, model_.get(), *provider_, method, q);
                reply_json(res, 200, out);
            } catch (const std::exception& e) {
                reply_json(res, 500, {{"error", e.what()}});
            }
        });
    }

    PipelineConfig defaults_;
    httplib::Server server_;
    std::atomic<bool> loaded_{false};
    std::shared_ptr<const CkGraph> graph_;
    std::shared_ptr<const ForestModel> model_;
    std::shared_ptr<const TextProvider> provider_;
};

}  // namespace ckdiag
