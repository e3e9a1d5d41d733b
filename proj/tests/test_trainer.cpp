#include <doctest.h>

#include <cmath>
#include <sstream>

#include "musae/corpus.hpp"
#include "musae/error.hpp"
#include "musae/graph.hpp"
#include "musae/trainer.hpp"
#include "musae/walker.hpp"

using namespace musae;

namespace {

Graph parse(const char* text) {
    std::istringstream in(text);
    return load_edge_list(in);
}

FeatureStore identity_store(std::uint32_t n) {
    std::vector<std::vector<FeatureId>> lists(n);
    for (std::uint32_t v = 0; v < n; ++v) lists[v] = {v};
    return feature_store_from_lists(std::move(lists), n);
}

double dot_block(const EmbeddingSet& e, NodeId v, FeatureId f,
                 std::uint32_t begin, std::uint32_t end) {
    double s = 0.0;
    for (std::uint32_t k = begin; k < end; ++k)
        s += e.g_row(v)[k] * e.h_row(f)[k];
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("initialization bounds and determinism") {
    EmbeddingSet e = init_embeddings(2, 2, 4, 9);
    CHECK(e.g.size() == 8);
    CHECK(e.h.size() == 8);
    for (double x : e.g) CHECK(std::abs(x) <= 0.125);
    for (double x : e.h) CHECK(std::abs(x) <= 0.125);

    EmbeddingSet f = init_embeddings(2, 2, 4, 9);
    CHECK(e.g == f.g);
    CHECK(e.h == f.h);
    EmbeddingSet g = init_embeddings(2, 2, 4, 10);
    CHECK(e.g != g.g);

    EmbeddingSet one = init_embeddings(3, 3, 1, 4);
    for (double x : one.g) {
        CHECK(x >= -0.5);
        CHECK(x <= 0.5);
    }
}

TEST_CASE("learning rate schedule") {
    TrainConfig cfg;
    CHECK(lr_at(0.0, cfg) == 0.05);
    CHECK(lr_at(1.0, cfg) == 0.025);
    CHECK(lr_at(0.5, cfg) == doctest::Approx(0.0375).epsilon(1e-15));
}

TEST_CASE("negative sampler follows count^exponent") {
    std::vector<std::uint64_t> counts{0, 2, 8};
    NegativeSampler s = NegativeSampler::from_counts(counts, 0.75);
    CHECK(s.probability(0) == 0.0);
    double w1 = std::pow(2.0, 0.75), w2 = std::pow(8.0, 0.75);
    CHECK(s.probability(1) == doctest::Approx(w1 / (w1 + w2)).epsilon(1e-12));

    Rng rng(3);
    const int draws = 200000;
    int hit[3] = {0, 0, 0};
    for (int i = 0; i < draws; ++i) ++hit[s.sample(rng)];
    CHECK(hit[0] == 0);
    double p1 = w1 / (w1 + w2);
    double band = 3.0 * std::sqrt(p1 * (1 - p1) / draws);
    CHECK(std::abs(static_cast<double>(hit[1]) / draws - p1) < band);

    SUBCASE("exponent one is the raw distribution") {
        NegativeSampler raw = NegativeSampler::from_counts(counts, 1.0);
        CHECK(raw.probability(2) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("all-zero counts are rejected") {
        std::vector<std::uint64_t> zero{0, 0};
        CHECK_THROWS_AS(NegativeSampler::from_counts(zero, 0.75), TaskError);
    }
}

TEST_CASE("pair update at zero dot product moves both rows") {
    EmbeddingSet e;
    e.node_count = 1;
    e.feature_count = 1;
    e.dim = 2;
    e.g = {0.2, 0.0};
    e.h = {0.0, 0.3};
    e.blocks = {{0, 2}};
    NegativeSampler s = NegativeSampler::from_counts({1}, 1.0);
    Rng rng(1);
    sgd_pair_update(e.g_row(0), e, 0, s, 0, 0.1, 0, 2, rng, false);
    // coef = 0.1 * (1 - sigma(0)) = 0.05, each row gains coef * other row
    CHECK(e.h[0] == doctest::Approx(0.05 * 0.2).epsilon(1e-15));
    CHECK(e.h[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(e.g[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(e.g[1] == doctest::Approx(0.05 * 0.3).epsilon(1e-15));
}

TEST_CASE("pair update clamps the dot product") {
    EmbeddingSet e;
    e.node_count = 1;
    e.feature_count = 1;
    e.dim = 1;
    e.g = {10.0};
    e.h = {1.0};
    e.blocks = {{0, 1}};
    NegativeSampler s = NegativeSampler::from_counts({1}, 1.0);
    Rng rng(1);
    sgd_pair_update(e.g_row(0), e, 0, s, 0, 1.0, 0, 1, rng, false);
    double coef = 1.0 - 1.0 / (1.0 + std::exp(-6.0));  // ~0.0024726
    CHECK(coef == doctest::Approx(0.0024726232).epsilon(1e-6));
    CHECK(e.h[0] == doctest::Approx(1.0 + coef * 10.0).epsilon(1e-12));
    CHECK(e.g[0] == doctest::Approx(10.0 + coef * 1.0).epsilon(1e-12));
}

TEST_CASE("zero learning rate is a no-op") {
    EmbeddingSet e = init_embeddings(2, 3, 4, 5);
    EmbeddingSet before = e;
    NegativeSampler s = NegativeSampler::from_counts({3, 1, 2}, 0.75);
    Rng rng(7);
    sgd_pair_update(e.g_row(1), e, 2, s, 5, 0.0, 0, 4, rng, false);
    CHECK(e.g == before.g);
    CHECK(e.h == before.h);
}

TEST_CASE("training separates cross pairs on P2") {
    Graph p2 = parse("0,1");
    FeatureStore fs = identity_store(2);
    WalkSet ws = generate_walks(p2, WalkRegime::PerNode, 50, 10, 3);
    ScaledCorpus corpus = build_pooled(ws, fs, 1);

    TrainConfig cfg;
    cfg.mode = EmbedMode::AE;
    cfg.dim = 8;
    cfg.window = 1;
    cfg.walk_length = 10;
    cfg.epochs = 5;
    cfg.negatives = 2;
    cfg.seed = 11;
    EmbeddingSet e = train(corpus, cfg);
    CHECK(dot_block(e, 0, 1, 0, 8) > dot_block(e, 0, 0, 0, 8));
    CHECK(dot_block(e, 1, 0, 0, 8) > dot_block(e, 1, 1, 0, 8));
}

TEST_CASE("frozen feature rows stay byte-identical") {
    SyntheticGraph sg = generate_erdos_renyi(12, 2, 6, 2, 8);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 5, 10, 2);
    ScaledCorpus corpus = build_pooled(ws, sg.features, 2);
    TrainConfig cfg;
    cfg.mode = EmbedMode::AE;
    cfg.dim = 8;
    cfg.window = 2;
    cfg.walk_length = 10;
    cfg.epochs = 2;
    cfg.seed = 21;
    EmbeddingSet base = train(corpus, cfg);

    cfg.seed = 22;
    EmbeddingSet transferred = train(corpus, cfg, &base);
    CHECK(transferred.h == base.h);
    CHECK(transferred.g != base.g);

    SUBCASE("shape mismatch is rejected") {
        EmbeddingSet wrong = init_embeddings(12, 6, 4, 1);
        CHECK_THROWS_AS(train(corpus, cfg, &wrong), UsageError);
    }
}

TEST_CASE("musae blocks train on their own sub-corpus only") {
    SyntheticGraph sg = generate_erdos_renyi(10, 2, 5, 1, 6);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 4, 12, 9);
    ScaledCorpus corpus = build_multiscale(ws, sg.features, 2);

    TrainConfig cfg;
    cfg.mode = EmbedMode::MUSAE;
    cfg.dim = 8;
    cfg.window = 2;
    cfg.walk_length = 12;
    cfg.epochs = 2;
    cfg.seed = 4;

    // empty out scale 2: its block must remain at initialization
    ScaledCorpus partial = corpus;
    partial.scales[1].forward.clear();
    partial.scales[1].backward.clear();
    EmbeddingSet e = train(partial, cfg);
    EmbeddingSet init = init_embeddings(10, 5, 8, 4);
    REQUIRE(e.blocks.size() == 2);
    CHECK(e.blocks[0].begin == 0);
    CHECK(e.blocks[0].end == 4);
    CHECK(e.blocks[1].begin == 4);
    CHECK(e.blocks[1].end == 8);
    bool block0_changed = false;
    for (NodeId v = 0; v < 10; ++v)
        for (std::uint32_t k = 0; k < 4; ++k)
            if (e.g_row(v)[k] != init.g_row(v)[k]) block0_changed = true;
    CHECK(block0_changed);
    for (NodeId v = 0; v < 10; ++v)
        for (std::uint32_t k = 4; k < 8; ++k)
            REQUIRE(e.g_row(v)[k] == init.g_row(v)[k]);
    for (FeatureId f = 0; f < 5; ++f)
        for (std::uint32_t k = 4; k < 8; ++k)
            REQUIRE(e.h_row(f)[k] == init.h_row(f)[k]);
}

TEST_CASE("single-thread training is bit-reproducible") {
    SyntheticGraph sg = generate_erdos_renyi(15, 2, 8, 2, 3);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 4, 10, 5);
    ScaledCorpus corpus = build_pooled(ws, sg.features, 2);
    TrainConfig cfg;
    cfg.mode = EmbedMode::AE;
    cfg.dim = 6;
    cfg.window = 2;
    cfg.walk_length = 10;
    cfg.epochs = 2;
    cfg.seed = 33;
    EmbeddingSet a = train(corpus, cfg);
    EmbeddingSet b = train(corpus, cfg);
    CHECK(a.g == b.g);
    CHECK(a.h == b.h);
    cfg.seed = 34;
    EmbeddingSet c = train(corpus, cfg);
    CHECK(a.g != c.g);
}

TEST_CASE("musae training is thread-count invariant") {
    SyntheticGraph sg = generate_erdos_renyi(12, 2, 6, 1, 19);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 4, 12, 7);
    ScaledCorpus corpus = build_multiscale(ws, sg.features, 3);
    TrainConfig cfg;
    cfg.mode = EmbedMode::MUSAE;
    cfg.dim = 6;
    cfg.window = 3;
    cfg.walk_length = 12;
    cfg.epochs = 2;
    cfg.seed = 13;
    cfg.threads = 1;
    EmbeddingSet a = train(corpus, cfg);
    cfg.threads = 3;
    EmbeddingSet b = train(corpus, cfg);
    CHECK(a.g == b.g);
    CHECK(a.h == b.h);
}

TEST_CASE("held-out objective improves with training") {
    SyntheticGraph sg = generate_erdos_renyi(20, 3, 8, 2, 10);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 8, 15, 6);
    ScaledCorpus corpus = build_pooled(ws, sg.features, 2);

    // hold out every hundredth pair
    ScaledCorpus trainset = corpus;
    trainset.scales[0].forward.clear();
    trainset.scales[0].backward.clear();
    std::vector<NodeFeaturePair> holdout;
    for (std::uint64_t i = 0; i < corpus.scales[0].size(); ++i) {
        NodeFeaturePair p = corpus.scales[0].pair(i);
        if (i % 100 == 0)
            holdout.push_back(p);
        else
            trainset.scales[0].forward.push_back(p);
    }

    TrainConfig cfg;
    cfg.mode = EmbedMode::AE;
    cfg.dim = 16;
    cfg.window = 2;
    cfg.walk_length = 15;
    cfg.epochs = 3;
    cfg.seed = 2;

    std::vector<std::uint64_t> counts(corpus.feature_count, 0);
    for (const auto& sc = trainset.scales[0]; const NodeFeaturePair& p : sc.forward)
        ++counts[p.feature];
    NegativeSampler sampler = NegativeSampler::from_counts(counts, cfg.neg_exponent);

    EmbeddingSet before = init_embeddings(20, corpus.feature_count, 16, 2);
    double obj0 = sgns_objective(before, holdout, sampler, cfg.negatives, 0, 16, 77);
    EmbeddingSet after = train(trainset, cfg);
    double obj1 = sgns_objective(after, holdout, sampler, cfg.negatives, 0, 16, 77);
    CHECK(obj1 > obj0);
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.mode = EmbedMode::MUSAE;
    cfg.dim = 128;
    cfg.window = 3;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg.dim = 126;
    CHECK_NOTHROW(cfg.validate());
    cfg.lr_min = 0.1;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg.lr_min = 0.025;
    cfg.window = 80;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg.window = 3;
    cfg.negatives = 0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("corpus and config modes must agree") {
    SyntheticGraph sg = generate_erdos_renyi(8, 2, 4, 1, 2);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 2, 8, 1);
    ScaledCorpus multi = build_multiscale(ws, sg.features, 2);
    TrainConfig cfg;
    cfg.mode = EmbedMode::AE;
    cfg.dim = 8;
    cfg.window = 2;
    cfg.walk_length = 8;
    CHECK_THROWS_AS(train(multi, cfg), UsageError);
    cfg.mode = EmbedMode::MUSAE;
    CHECK_NOTHROW(train(multi, cfg));
    ScaledCorpus other = build_multiscale(ws, sg.features, 4);
    cfg.window = 2;  // corpus says 4
    CHECK_THROWS_AS(train(other, cfg), UsageError);
}

TEST_CASE("embedding CSV round trip") {
    std::vector<double> rows{0.1, 0.2};
    std::ostringstream out;
    write_embedding_csv(rows, 2, {"a"}, out);
    CHECK(out.str() == "id,x_0,x_1\na,0.1,0.2\n");

    SyntheticGraph sg = generate_erdos_renyi(6, 2, 4, 1, 5);
    WalkSet ws = generate_walks(sg.graph, WalkRegime::PerNode, 3, 8, 2);
    ScaledCorpus corpus = build_pooled(ws, sg.features, 2);
    TrainConfig cfg;
    cfg.mode = EmbedMode::AE;
    cfg.dim = 5;
    cfg.window = 2;
    cfg.walk_length = 8;
    cfg.epochs = 2;
    EmbeddingSet e = train(corpus, cfg);
    std::ostringstream nodes;
    write_embedding_csv(e.g, e.dim, sg.graph.ids.names(), nodes);
    std::istringstream back(nodes.str());
    std::size_t dim = 0;
    std::vector<std::string> ids;
    std::vector<double> again = read_embedding_csv(back, dim, ids);
    REQUIRE(dim == 5);
    REQUIRE(ids.size() == 6);
    REQUIRE(again.size() == e.g.size());
    for (std::size_t i = 0; i < again.size(); ++i)
        CHECK(std::abs(again[i] - e.g[i]) <= 1e-9);

    std::vector<std::string> fids;
    for (FeatureId f = 0; f < e.feature_count; ++f) fids.push_back(std::to_string(f));
    std::ostringstream feats;
    write_embedding_csv(e.h, e.dim, fids, feats);
    int lines = 0;
    for (char ch : feats.str()) lines += ch == '\n';
    CHECK(lines == 1 + static_cast<int>(e.feature_count));
}

TEST_CASE("sidecar records the run") {
    TrainConfig cfg;
    cfg.mode = EmbedMode::MUSAE;
    cfg.dim = 6;
    cfg.window = 3;
    cfg.seed = 99;
    EmbeddingSet e = init_embeddings(2, 3, 6, 99);
    e.blocks = {{0, 2}, {2, 4}, {4, 6}};
    IdMap ids;
    ids.intern("a");
    ids.intern("b");
    std::ostringstream out;
    write_sidecar(cfg, e, ids, out);
    std::string s = out.str();
    CHECK(s.find("\"seed\": 99") != std::string::npos);
    CHECK(s.find("\"mode\": \"musae\"") != std::string::npos);
    CHECK(s.find("\"node_ids\"") != std::string::npos);
    CHECK(s.find("scale_blocks") != std::string::npos);
}

TEST_SUITE_END();
