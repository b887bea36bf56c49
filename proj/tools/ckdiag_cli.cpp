// Command-line driver for the CK-graph diagnostic pipeline:
//   synth    - generate a synthetic corpus from a scenario file
//   build    - construct and persist the CK graph from alerts + reports
//   train    - train and persist the outage cluster predictor
//   infer    - rank likely root causes / remediations for a set of alerts
//   evaluate - leave-one-out evaluation of an inference method
//   serve    - read-only HTTP inference service over persisted artifacts

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ckdiag/ckdiag.hpp"

namespace {

ckdiag::AlertLog read_alert_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ckdiag::Error("cannot read alert log '" + path + "'");
    return ckdiag::parse_alerts(in);
}

std::vector<ckdiag::OutageReport> read_reports(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ckdiag::Error("cannot read outage reports '" + path + "'");
    return ckdiag::parse_reports(in);
}

ckdiag::PipelineConfig read_config(const std::string& path, std::optional<std::uint64_t> seed) {
    ckdiag::PipelineConfig cfg = path.empty() ? ckdiag::PipelineConfig{} : ckdiag::load_config(path);
    if (seed) cfg.seed = *seed;
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ckdiag::Error("cannot write '" + path + "'");
    out << text;
}

std::set<std::string> parse_alert_ids(const std::string& csv, const std::string& file) {
    std::set<std::string> ids;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) ids.insert(item);
    }
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ckdiag::Error("cannot read alerts file '" + file + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) ids.insert(line);
        }
    }
    return ids;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CK-graph root cause diagnostics"};
    app.require_subcommand(1);

    std::string config_path, alerts_path, reports_path, graph_path, model_path, out_path;
    std::optional<std::uint64_t> seed;

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus from a scenario");
    std::string scenario_path, out_dir = ".";
    synth->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    synth->add_option("--out-dir", out_dir, "output directory");
    synth->add_option("--seed", seed, "override the scenario seed");

    // --- build ---
    auto* build = app.add_subcommand("build", "construct the CK graph");
    build->add_option("--alerts", alerts_path, "alert log (JSON lines)")->required();
    build->add_option("--reports", reports_path, "outage report document")->required();
    build->add_option("--config", config_path, "pipeline config JSON");
    build->add_option("--seed", seed, "override the config seed");
    build->add_option("--out", out_path, "output graph file")->required();

    // --- train ---
    auto* train = app.add_subcommand("train", "train the outage cluster predictor");
    train->add_option("--graph", graph_path, "CK graph file")->required();
    train->add_option("--alerts", alerts_path, "alert log (JSON lines)")->required();
    train->add_option("--reports", reports_path, "outage report document")->required();
    train->add_option("--config", config_path, "pipeline config JSON");
    train->add_option("--seed", seed, "override the config seed");
    train->add_option("--out", out_path, "output model file")->required();

    // --- infer ---
    auto* infer = app.add_subcommand("infer", "rank likely root causes for fired alerts");
    std::string method = "clust", alerts_csv, alerts_file;
    std::optional<std::size_t> k_opt, l_opt, top_n_opt;
    infer->add_option("--graph", graph_path, "CK graph file")->required();
    infer->add_option("--model", model_path, "forest model file (required for clust)");
    infer->add_option("--method", method, "path | sim | clust");
    infer->add_option("--alerts", alerts_csv, "comma-separated fired alert ids");
    infer->add_option("--alerts-file", alerts_file, "file with one alert id per line");
    infer->add_option("--config", config_path, "pipeline config JSON");
    infer->add_option("--k", k_opt, "traversal hop budget");
    infer->add_option("--L", l_opt, "clusters kept by clust");
    infer->add_option("--top-n", top_n_opt, "recommendations returned");
    infer->add_option("--out", out_path, "output file ('-' for stdout)");

    // --- evaluate ---
    auto* evaluate = app.add_subcommand("evaluate", "leave-one-out evaluation");
    std::size_t top_k = 5, sample = 50;
    bool table = false;
    evaluate->add_option("--alerts", alerts_path, "alert log (JSON lines)")->required();
    evaluate->add_option("--reports", reports_path, "outage report document")->required();
    evaluate->add_option("--config", config_path, "pipeline config JSON");
    evaluate->add_option("--method", method, "path | sim | clust | incident_search");
    evaluate->add_option("--top-k", top_k, "recommendations scored per outage");
    evaluate->add_option("--sample", sample, "number of outages evaluated");
    evaluate->add_option("--seed", seed, "sampling / pipeline seed");
    evaluate->add_option("--out", out_path, "output report file ('-' for stdout)");
    evaluate->add_flag("--table", table, "also print a human-readable table");

    // --- serve ---
    auto* serve = app.add_subcommand("serve", "HTTP inference service");
    std::string bind_address = "127.0.0.1:8080";
    serve->add_option("--graph", graph_path, "CK graph file")->required();
    serve->add_option("--model", model_path, "forest model file");
    serve->add_option("--config", config_path, "pipeline config JSON");
    serve->add_option("--bind", bind_address, "host:port to listen on");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            std::ifstream in(scenario_path);
            if (!in) throw ckdiag::Error("cannot read scenario '" + scenario_path + "'");
            nlohmann::json sj;
            in >> sj;
            ckdiag::ScenarioSpec spec = ckdiag::scenario_from_json(sj);
            if (seed) spec.seed = *seed;
            const ckdiag::SyntheticCorpus corpus = ckdiag::generate_corpus(spec);
            {
                std::ofstream out(out_dir + "/alerts.jsonl");
                if (!out) throw ckdiag::Error("cannot write to '" + out_dir + "'");
                ckdiag::write_alerts(out, corpus.log);
            }
            {
                std::ofstream out(out_dir + "/reports.json");
                ckdiag::write_reports(out, corpus.reports);
            }
            {
                nlohmann::json align = nlohmann::json::object();
                for (const auto& [dup, orig] : corpus.duplicate_of) align[dup] = orig;
                std::ofstream out(out_dir + "/alignment.json");
                out << align.dump(2) << "\n";
            }
            std::cout << "wrote " << corpus.log.size() << " alerts, " << corpus.reports.size()
                      << " reports to " << out_dir << "\n";
        } else if (*build) {
            const auto cfg = read_config(config_path, seed);
            const auto log = read_alert_log(alerts_path);
            const auto reports = read_reports(reports_path);
            const ckdiag::TextProvider provider(cfg.text);
            const auto result = ckdiag::build_pipeline(log, reports, cfg, provider);
            print_warnings(result.warnings);
            ckdiag::save_ck_graph(result.graph, out_path);
            std::cout << "graph: " << result.graph.cpdag.nodes.size() << " alerts, "
                      << result.graph.cpdag.edge_count() << " causal edges, "
                      << result.graph.kg.size() << " outages, "
                      << result.graph.caused_outage_edge_count() << " caused-outage edges, "
                      << result.graph.clusters.k_merged << " merged clusters -> " << out_path
                      << "\n";
        } else if (*train) {
            const auto cfg = read_config(config_path, seed);
            const auto graph = ckdiag::load_ck_graph(graph_path);
            const auto log = read_alert_log(alerts_path);
            const auto reports = read_reports(reports_path);
            std::vector<std::string> warnings;
            const auto model = ckdiag::train_predictor(graph, log, reports, cfg, &warnings);
            print_warnings(warnings);
            ckdiag::save_forest(model, out_path);
            std::cout << "model: " << model.trees.size() << " trees over "
                      << model.feature_names.size() << " features, " << model.classes.size()
                      << " classes -> " << out_path << "\n";
        } else if (*infer) {
            const auto cfg = read_config(config_path, seed);
            const auto graph = ckdiag::load_ck_graph(graph_path);
            std::optional<ckdiag::ForestModel> model;
            if (!model_path.empty()) model = ckdiag::load_forest(model_path);
            ckdiag::TextConfig text_cfg = cfg.text;
            text_cfg.embedding_dim = graph.metadata.embedding_dim;
            const ckdiag::TextProvider provider(text_cfg);
            ckdiag::InferenceQuery q;
            q.fired_alert_ids = parse_alert_ids(alerts_csv, alerts_file);
            q.k_hops = k_opt.value_or(cfg.k_hops);
            q.top_l = l_opt.value_or(cfg.top_l);
            q.top_n = top_n_opt.value_or(cfg.top_n);
            const nlohmann::json out = ckdiag::run_inference(
                graph, model ? &*model : nullptr, provider, method, q);
            write_text(out_path, out.dump(2) + "\n");
        } else if (*evaluate) {
            const auto cfg = read_config(config_path, seed);
            const auto log = read_alert_log(alerts_path);
            const auto reports = read_reports(reports_path);
            const ckdiag::TextProvider provider(cfg.text);
            const auto report = ckdiag::leave_one_out_eval(
                log, reports, cfg, provider, ckdiag::eval_method_from_string(method), top_k,
                sample, seed.value_or(cfg.seed));
            write_text(out_path, ckdiag::eval_report_to_json(report).dump(2) + "\n");
            if (table) std::cout << ckdiag::eval_report_table(report);
        } else if (*serve) {
            const auto cfg = read_config(config_path, seed);
            ckdiag::InferenceService service(cfg);
            const auto graph = ckdiag::load_ck_graph(graph_path);
            std::optional<ckdiag::ForestModel> model;
            if (!model_path.empty()) model = ckdiag::load_forest(model_path);
            ckdiag::TextConfig text_cfg = cfg.text;
            text_cfg.embedding_dim = graph.metadata.embedding_dim;
            service.load(graph, std::move(model), ckdiag::TextProvider(text_cfg));
            const auto colon = bind_address.rfind(':');
            if (colon == std::string::npos) throw ckdiag::Error("--bind must be host:port");
            const std::string host = bind_address.substr(0, colon);
            const int port = std::stoi(bind_address.substr(colon + 1));
            std::cout << "serving on " << host << ":" << port << "\n";
            if (!service.serve(host, port)) throw ckdiag::Error("cannot bind " + bind_address);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
