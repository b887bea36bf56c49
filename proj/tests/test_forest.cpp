#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "ckdiag/random_forest.hpp"
#include "ckdiag/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace ckdiag;

namespace {

// Each cluster keyed by one distinctive alert; n_per copies per cluster.
TrainingSet separable_set(std::size_t n_clusters, std::size_t n_per) {
    TrainingSet ts;
    for (std::size_t f = 0; f < n_clusters; ++f) ts.feature_names.push_back("key" + std::to_string(f));
    ts.feature_names.push_back("noise");
    int row_id = 0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        for (std::size_t i = 0; i < n_per; ++i) {
            std::vector<std::uint8_t> row(ts.feature_names.size(), 0);
            row[c] = 1;
            row.back() = static_cast<std::uint8_t>((row_id % 3) == 0);
            ts.rows.push_back(std::move(row));
            ts.labels.push_back(static_cast<int>(c));
            char buf[16];
            std::snprintf(buf, sizeof(buf), "OUT-%03d", row_id++);
            ts.row_ids.push_back(buf);
        }
    }
    return ts;
}

}  // namespace

TEST_CASE("training set rows are indicator vectors over the universe") {
    const TextProvider provider;
    CkGraph ck;
    ck.cpdag.nodes = {"a", "b", "c"};
    const std::vector<OutageReport> reports = {
        fixtures::report("O1", "2024-01-01T10:00:00Z", "2024-01-01T11:00:00Z", "s1", "r1", "m1"),
        fixtures::report("O2", "2024-02-01T10:00:00Z", "2024-02-01T11:00:00Z", "s2", "r2", "m2")};
    ck.kg = build_kg(reports, provider);
    ck.clusters.merged = {{"O1", 0}, {"O2", 0}};
    ck.metadata.pre_window = hours(1);
    AlertLog log;
    log.alerts = {fixtures::alert("a", "2024-01-01T10:30:00Z"),
                  fixtures::alert("c", "2024-01-01T09:30:00Z"),
                  fixtures::alert("b", "2024-03-01T00:00:00Z")};
    log.sort();
    std::vector<std::string> warnings;
    const TrainingSet ts = build_training_set(ck, log, reports, &warnings);
    REQUIRE(ts.size() == 2);
    CHECK(ts.feature_names == std::vector<std::string>{"a", "b", "c"});
    CHECK(ts.rows[0] == std::vector<std::uint8_t>{1, 0, 1});  // O1 overlaps a and c
    CHECK(ts.rows[1] == std::vector<std::uint8_t>{0, 0, 0});  // O2 overlaps nothing
    CHECK(ts.labels[0] == ts.labels[1]);  // same merged cluster
    REQUIRE(warnings.size() == 1);        // the all-zero row is reported
    CHECK(warnings[0].find("O2") != std::string::npos);
}

TEST_CASE("training set rows match the interval-scan oracle on a synthetic corpus") {
    const auto spec = fixtures::retrieval_scenario(10, 1, 55);
    const SyntheticCorpus corpus = generate_corpus(spec);
    const TextProvider provider;
    const auto cfg = fixtures::small_corpus_config(55);
    const PipelineBuild build = build_pipeline(corpus.log, corpus.reports, cfg, provider);
    const TrainingSet ts = build_training_set(build.graph, corpus.log, corpus.reports);
    REQUIRE(ts.size() == corpus.reports.size());
    for (std::size_t r = 0; r < ts.size(); ++r) {
        const auto& outage = *std::find_if(
            corpus.reports.begin(), corpus.reports.end(),
            [&](const OutageReport& o) { return o.outage_id == ts.row_ids[r]; });
        const auto fired =
            oracles::interval_scan(corpus.log, outage.start_time - hours(1), outage.resolution_time);
        for (std::size_t f = 0; f < ts.feature_names.size(); ++f) {
            CHECK(static_cast<bool>(ts.rows[r][f]) ==
                  (fired.count(ts.feature_names[f]) > 0));
        }
    }
}

TEST_CASE("a separable training set is fit perfectly") {
    const TrainingSet ts = separable_set(4, 6);
    const ForestModel model = train_forest(ts, 50, 25, 7);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < ts.size(); ++r) {
        const auto probs = predict_proba(model, ts.rows[r]);
        const std::size_t argmax =
            std::max_element(probs.begin(), probs.end()) - probs.begin();
        if (model.classes[argmax] == ts.labels[r]) ++correct;
    }
    CHECK(correct == ts.size());
    CHECK(top_k_precision(model, ts, 1) == 1.0);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const TrainingSet ts = separable_set(3, 5);
    const ForestModel m1 = train_forest(ts, 20, 10, 42);
    const ForestModel m2 = train_forest(ts, 20, 10, 42);
    CHECK(forest_to_json(m1) == forest_to_json(m2));

    Rng rng(9);
    for (int probe = 0; probe < 50; ++probe) {
        std::vector<std::uint8_t> x(ts.feature_names.size(), 0);
        for (auto& v : x) v = static_cast<std::uint8_t>(rng.next_below(2));
        CHECK(predict_proba(m1, x) == predict_proba(m2, x));
    }
}

TEST_CASE("training is invariant to row order") {
    const TrainingSet ts = separable_set(3, 5);
    TrainingSet shuffled = ts;
    Rng rng(31);
    std::vector<std::size_t> perm(ts.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled.rows[i] = ts.rows[perm[i]];
        shuffled.labels[i] = ts.labels[perm[i]];
        shuffled.row_ids[i] = ts.row_ids[perm[i]];
    }
    const ForestModel a = train_forest(ts, 20, 10, 5);
    const ForestModel b = train_forest(shuffled, 20, 10, 5);
    CHECK(forest_to_json(a) == forest_to_json(b));
}

TEST_CASE("depth zero gives every tree the bootstrap prior") {
    TrainingSet ts = separable_set(2, 4);
    // make class 0 the clear majority
    for (auto& l : ts.labels) {
        if (l == 1 && (&l - ts.labels.data()) % 2 == 0) l = 0;
    }
    const ForestModel model = train_forest(ts, 30, 0, 3);
    for (const auto& tree : model.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].feature == -1);
    }
    const auto probs = predict_proba(model, std::vector<std::uint8_t>(ts.feature_names.size(), 0));
    CHECK(probs[0] > probs[1]);  // majority class prior dominates
}

TEST_CASE("single-label training sets are rejected") {
    TrainingSet ts = separable_set(2, 4);
    for (auto& l : ts.labels) l = 0;
    CHECK_THROWS_AS(train_forest(ts, 10, 5, 1), InvalidArgument);
}

TEST_CASE("prediction probabilities are a distribution") {
    const TrainingSet ts = separable_set(5, 8);
    const ForestModel model = train_forest(ts, 25, 12, 11);
    Rng rng(12);
    for (int probe = 0; probe < 1000; ++probe) {
        std::vector<std::uint8_t> x(ts.feature_names.size(), 0);
        for (auto& v : x) v = static_cast<std::uint8_t>(rng.next_below(2));
        const auto probs = predict_proba(model, x);
        double sum = 0;
        bool nonneg = true;
        for (double p : probs) {
            sum += p;
            nonneg = nonneg && p >= 0.0;
        }
        CHECK(nonneg);
        CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }
    CHECK_THROWS_AS(predict_proba(model, std::vector<std::uint8_t>(2, 0)), InvalidArgument);
}

TEST_CASE("a manually built one-leaf forest predicts its class with probability 1") {
    const nlohmann::json j = {{"version", kForestFormatVersion},
                              {"feature_names", {"a", "b"}},
                              {"classes", {7}},
                              {"n_trees", 2},
                              {"max_depth", 1},
                              {"seed", 0},
                              {"trees", {{{"nodes", {{{"dist", {1.0}}}}}},
                                         {{"nodes", {{{"dist", {1.0}}}}}}}}};
    const ForestModel model = forest_from_json(j);
    const auto probs = predict_proba(model, {0, 1});
    REQUIRE(probs.size() == 1);
    CHECK(probs[0] == 1.0);
}

TEST_CASE("top-k precision saturates and never decreases in k") {
    const TrainingSet ts = separable_set(4, 6);
    const auto [train_part, test_part] = train_test_split(ts, 0.3, 9);
    const ForestModel model = train_forest(train_part, 40, 20, 9);
    double prev = 0.0;
    for (std::size_t k = 1; k <= model.classes.size(); ++k) {
        const double p = top_k_precision(model, test_part, k);
        CHECK(p >= prev);
        prev = p;
    }
    CHECK(top_k_precision(model, test_part, model.classes.size()) == 1.0);
}

TEST_CASE("uniform model top-k precision approaches k over c") {
    // one uniform leaf over 5 classes; random labels
    nlohmann::json tree = {{"nodes", {{{"dist", {0.2, 0.2, 0.2, 0.2, 0.2}}}}}};
    const nlohmann::json j = {{"version", kForestFormatVersion},
                              {"feature_names", {"a"}},
                              {"classes", {0, 1, 2, 3, 4}},
                              {"n_trees", 1},
                              {"max_depth", 1},
                              {"seed", 0},
                              {"trees", {tree}}};
    const ForestModel model = forest_from_json(j);
    // with all probabilities tied, the top-k are the k smallest class ids
    Rng rng(13);
    TrainingSet test;
    test.feature_names = {"a"};
    for (int i = 0; i < 4000; ++i) {
        test.rows.push_back({0});
        test.row_ids.push_back("r" + std::to_string(i));
        test.labels.push_back(static_cast<int>(rng.next_below(5)));
    }
    for (std::size_t k = 1; k <= 5; ++k) {
        CHECK(top_k_precision(model, test, k) ==
              Catch::Approx(static_cast<double>(k) / 5.0).margin(0.05));
    }
}

TEST_CASE("train/test split is seeded and sized by floor") {
    const TrainingSet ts = separable_set(4, 5);  // 20 rows
    const auto [train1, test1] = train_test_split(ts, 0.3, 77);
    const auto [train2, test2] = train_test_split(ts, 0.3, 77);
    CHECK(test1.size() == 6);  // floor(20 * 0.3)
    CHECK(train1.size() == 14);
    CHECK(train1.row_ids == train2.row_ids);
    CHECK(test1.row_ids == test2.row_ids);
}

TEST_CASE("forest model persistence round-trips") {
    const TrainingSet ts = separable_set(3, 6);
    const ForestModel model = train_forest(ts, 15, 8, 21);
    const std::string path = "ckdiag_test_forest.json";
    save_forest(model, path);
    const ForestModel back = load_forest(path);
    CHECK(forest_to_json(back) == forest_to_json(model));
    std::remove(path.c_str());

    const std::string bad = "ckdiag_test_forest_bad.json";
    {
        std::ofstream out(bad);
        out << R"({"version":"ckdiag.forest/999"})";
    }
    CHECK_THROWS_AS(load_forest(bad), VersionError);
    std::remove(bad.c_str());
}
