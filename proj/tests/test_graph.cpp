#include <doctest.h>

#include <cmath>
#include <sstream>

#include "musae/error.hpp"
#include "musae/graph.hpp"
#include "musae/rng.hpp"

using namespace musae;

TEST_SUITE_BEGIN("graph");

TEST_CASE("path graph from edge list") {
    std::istringstream in("0,1\n1,2");
    Graph g = load_edge_list(in);
    CHECK(g.node_count == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.volume == 4);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("self-loops dropped, duplicates merged") {
    std::istringstream in("0,1\n1,0\n0,0");
    Graph g = load_edge_list(in);
    CHECK(g.node_count == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.volume == 2);
    CHECK(g.self_loops_dropped == 1);
    CHECK(g.duplicate_edges_merged == 1);
}

TEST_CASE("string ids interned in first-appearance order") {
    std::istringstream in("a,b\nb,c");
    Graph g = load_edge_list(in);
    CHECK(g.node_count == 3);
    CHECK(g.ids.find("a") == 0);
    CHECK(g.ids.find("b") == 1);
    CHECK(g.ids.find("c") == 2);
    CHECK(g.ids.find("d") == -1);
}

TEST_CASE("header, comments, whitespace pairs") {
    std::istringstream in("# a comment\nid_1,id_2\n0 1\n\n1\t2\n");
    Graph g = load_edge_list(in);
    CHECK(g.node_count == 3);
    CHECK(g.edge_count() == 2);
}

TEST_CASE("malformed line names its number") {
    std::istringstream in("0,1\n0,1,2\n");
    CHECK_THROWS_WITH_AS(load_edge_list(in), doctest::Contains("line 2"), TaskError);
}

TEST_CASE("isolated node rejected unless allowed") {
    std::istringstream a("0,0\n1,2");
    CHECK_THROWS_AS(load_edge_list(a), TaskError);

    std::istringstream b("0,0\n1,2");
    LoadOptions opts;
    opts.allow_isolated = true;
    Graph g = load_edge_list(b, opts);
    CHECK(g.node_count == 3);
    CHECK(g.degree(0) == 0);
}

TEST_CASE("volume equals twice the edge count") {
    std::istringstream in("0,1\n0,2\n0,3\n2,3");
    Graph g = load_edge_list(in);
    CHECK(g.volume == 2 * g.edge_count());
    std::uint64_t sum = 0;
    for (NodeId v = 0; v < g.node_count; ++v) sum += g.degree(v);
    CHECK(sum == g.volume);
}

TEST_CASE("edge list round-trip preserves adjacency") {
    std::istringstream in("a,b\nb,c\nc,a\nc,d");
    Graph g = load_edge_list(in);
    std::ostringstream out;
    write_edge_list(g, out);
    std::istringstream back(out.str());
    Graph h = load_edge_list(back);
    REQUIRE(h.node_count == g.node_count);
    CHECK(h.offsets == g.offsets);
    CHECK(h.neighbors == g.neighbors);
}

TEST_CASE("feature loading sorts and dedupes") {
    std::istringstream ein("0,1");
    Graph g = load_edge_list(ein);
    std::istringstream fin(R"({"0":[2,1],"1":[1]})");
    FeatureStore fs = load_features(fin, g);
    CHECK(fs.feature_count == 3);
    CHECK(fs.total_incidence == 3);
    auto f0 = fs.features_of(0);
    REQUIRE(f0.size() == 2);
    CHECK(f0[0] == 1);
    CHECK(f0[1] == 2);
    CHECK(fs.has_feature(1, 1));
    CHECK_FALSE(fs.has_feature(1, 2));
}

TEST_CASE("missing and empty feature lists") {
    std::istringstream ein("0,1\n1,2");
    Graph g = load_edge_list(ein);
    std::istringstream fin(R"({"0":[],"1":[0]})");
    FeatureStore fs = load_features(fin, g);
    CHECK(fs.total_incidence == 1);
    CHECK(fs.features_of(0).empty());
    CHECK(fs.nodes_missing_in_input == 1);
}

TEST_CASE("feature errors") {
    std::istringstream ein("0,1");
    Graph g = load_edge_list(ein);

    std::istringstream unknown(R"({"7":[0]})");
    CHECK_THROWS_AS(load_features(unknown, g), TaskError);

    std::istringstream ein2("0,1");
    Graph g2 = load_edge_list(ein2);
    std::istringstream negative(R"({"0":[-1]})");
    CHECK_THROWS_AS(load_features(negative, g2), TaskError);

    std::istringstream notjson("not json");
    CHECK_THROWS_AS(load_features(notjson, g2), TaskError);
}

TEST_CASE("ego augmentation appends one unique feature per node") {
    std::istringstream ein("0,1");
    Graph g = load_edge_list(ein);
    FeatureStore fs = feature_store_from_lists({{1}, {}}, 3);
    FeatureStore aug = ego_augment(fs, g);
    CHECK(aug.feature_count == 5);
    auto f0 = aug.features_of(0);
    REQUIRE(f0.size() == 2);
    CHECK(f0[0] == 1);
    CHECK(f0[1] == 3);
    auto f1 = aug.features_of(1);
    REQUIRE(f1.size() == 1);
    CHECK(f1[0] == 4);

    SUBCASE("empty store gives identity features") {
        std::istringstream tri("0,1\n1,2\n2,0");
        Graph k3 = load_edge_list(tri);
        FeatureStore none = feature_store_from_lists({{}, {}, {}}, 0);
        FeatureStore ident = ego_augment(none, k3);
        CHECK(ident.feature_count == 3);
        for (NodeId v = 0; v < 3; ++v) {
            REQUIRE(ident.features_of(v).size() == 1);
            CHECK(ident.features_of(v)[0] == v);
        }
    }
    SUBCASE("augmenting twice is not idempotent") {
        FeatureStore twice = ego_augment(aug, g);
        CHECK(twice.feature_count == 3 + 2 + 2);
        CHECK(twice.features_of(0).size() == 3);
    }
}

TEST_CASE("remove_feature drops incidences but keeps q") {
    FeatureStore fs = feature_store_from_lists({{0, 2}, {2}}, 3);
    FeatureStore cut = remove_feature(fs, 2);
    CHECK(cut.feature_count == 3);
    CHECK(cut.total_incidence == 1);
    CHECK_FALSE(cut.has_feature(0, 2));
    CHECK(cut.has_feature(0, 0));
    CHECK(cut.features_of(1).empty());
}

TEST_CASE("dense view on P2 with identity features") {
    std::istringstream ein("0,1");
    Graph g = load_edge_list(ein);
    FeatureStore fs = feature_store_from_lists({{0}, {1}}, 2);
    DenseView view = dense_view(g, fs);
    CHECK(view.p.at(0, 0) == 0.0);
    CHECK(view.p.at(0, 1) == 1.0);
    CHECK(view.p.at(1, 0) == 1.0);
    CHECK(view.p.at(1, 1) == 0.0);
    REQUIRE(view.e_diag.size() == 2);
    CHECK(view.e_diag[0] == 1.0);
    CHECK(view.e_diag[1] == 1.0);
}

TEST_CASE("dense view on K3 with identity features") {
    std::istringstream ein("0,1\n1,2\n2,0");
    Graph g = load_edge_list(ein);
    FeatureStore fs = feature_store_from_lists({{0}, {1}, {2}}, 3);
    DenseView view = dense_view(g, fs);
    for (NodeId i = 0; i < 3; ++i) {
        double row = 0.0;
        for (NodeId j = 0; j < 3; ++j) {
            row += view.p.at(i, j);
            if (i == j)
                CHECK(view.p.at(i, j) == 0.0);
            else
                CHECK(view.p.at(i, j) == 0.5);
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(view.e_diag[i] == 2.0);
    }
}

TEST_CASE("dense view on star S3 with one shared feature") {
    std::istringstream ein("0,1\n0,2\n0,3");
    Graph g = load_edge_list(ein);
    FeatureStore fs = feature_store_from_lists({{0}, {0}, {0}, {0}}, 1);
    DenseView view = dense_view(g, fs);
    REQUIRE(view.e_diag.size() == 1);
    CHECK(view.e_diag[0] == 6.0);
    CHECK(view.e_diag[0] == static_cast<double>(g.volume));
}

TEST_CASE("dense view cap") {
    std::istringstream ein("0,1\n1,2");
    Graph g = load_edge_list(ein);
    FeatureStore fs = feature_store_from_lists({{0}, {0}, {0}}, 1);
    CHECK_THROWS_AS(dense_view(g, fs, 2), CapError);
}

TEST_CASE("P rows sum to one on random graphs") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticGraph sg = generate_erdos_renyi(64, 3, 16, 2, seed);
        DenseView view = dense_view(sg.graph, sg.features);
        for (NodeId v = 0; v < sg.graph.node_count; ++v) {
            double row = 0.0;
            for (NodeId u = 0; u < sg.graph.node_count; ++u) {
                CHECK(view.p.at(v, u) >= 0.0);
                row += view.p.at(v, u);
            }
            CHECK(std::abs(row - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("matmul basics") {
    Matrix a(2, 3), b(3, 2);
    double av[] = {1, 2, 3, 4, 5, 6};
    double bv[] = {7, 8, 9, 10, 11, 12};
    std::copy(av, av + 6, a.data.begin());
    std::copy(bv, bv + 6, b.data.begin());
    Matrix c = matmul(a, b);
    CHECK(c.at(0, 0) == 58.0);
    CHECK(c.at(0, 1) == 64.0);
    CHECK(c.at(1, 0) == 139.0);
    CHECK(c.at(1, 1) == 154.0);
}

TEST_CASE("erdos-renyi generator") {
    SUBCASE("mean degree concentrates") {
        SyntheticGraph sg = generate_erdos_renyi(1u << 11, 8, 1u << 11, 1u << 4, 7);
        double mean = static_cast<double>(sg.graph.volume) / sg.graph.node_count;
        CHECK(mean >= 14.0);
        CHECK(mean <= 18.0);
        CHECK(sg.features.total_incidence == sg.graph.node_count * 16u);
    }
    SUBCASE("connectivity repair") {
        SyntheticGraph sg = generate_erdos_renyi(4, 1, 4, 1, 3);
        for (NodeId v = 0; v < 4; ++v) CHECK(sg.graph.degree(v) >= 1);
    }
    SUBCASE("same seed reproduces the edge set") {
        SyntheticGraph a = generate_erdos_renyi(128, 4, 32, 3, 11);
        SyntheticGraph b = generate_erdos_renyi(128, 4, 32, 3, 11);
        CHECK(a.graph.neighbors == b.graph.neighbors);
        CHECK(a.features.items == b.features.items);
        SyntheticGraph c = generate_erdos_renyi(128, 4, 32, 3, 12);
        CHECK(a.graph.neighbors != c.graph.neighbors);
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(generate_erdos_renyi(1, 1, 4, 1, 0), UsageError);
        CHECK_THROWS_AS(generate_erdos_renyi(8, 1, 2, 3, 0), UsageError);
    }
    SUBCASE("feature draws are distinct per node") {
        SyntheticGraph sg = generate_erdos_renyi(64, 3, 8, 5, 9);
        for (NodeId v = 0; v < 64; ++v) {
            auto fv = sg.features.features_of(v);
            CHECK(fv.size() == 5);
            CHECK(std::adjacent_find(fv.begin(), fv.end()) == fv.end());
        }
    }
}

TEST_CASE("sbm generator") {
    SbmConfig cfg;
    cfg.nodes_per_community = 60;
    cfg.communities = 2;
    cfg.p_in = 0.2;
    cfg.p_out = 0.01;
    cfg.features_per_node = 4;
    cfg.pool_per_community = 16;
    SyntheticGraph sg = generate_sbm(cfg, 5);
    CHECK(sg.graph.node_count == 120);
    CHECK(sg.features.feature_count == 32);
    REQUIRE(sg.communities.size() == 120);
    CHECK(sg.communities[0] == 0);
    CHECK(sg.communities[119] == 1);

    // in-community edges should dominate
    std::uint64_t in = 0, out = 0;
    for (auto [u, v] : sg.graph.edges())
        (sg.communities[u] == sg.communities[v] ? in : out)++;
    CHECK(in > 4 * out);

    // features lean heavily toward the owner community's slice
    std::uint64_t own = 0, other = 0;
    for (NodeId v = 0; v < sg.graph.node_count; ++v)
        for (FeatureId f : sg.features.features_of(v))
            (f / cfg.pool_per_community == sg.communities[v] ? own : other)++;
    CHECK(own > 4 * other);

    SyntheticGraph again = generate_sbm(cfg, 5);
    CHECK(again.graph.neighbors == sg.graph.neighbors);
    CHECK(again.features.items == sg.features.items);
}

TEST_CASE("connectivity and bipartiteness checks") {
    std::istringstream tri("0,1\n1,2\n2,0");
    Graph k3 = load_edge_list(tri);
    CHECK(is_connected(k3));
    CHECK_FALSE(is_bipartite(k3));

    std::istringstream p3("0,1\n1,2");
    Graph path = load_edge_list(p3);
    CHECK(is_connected(path));
    CHECK(is_bipartite(path));

    std::istringstream two("0,1\n2,3");
    Graph split = load_edge_list(two);
    CHECK_FALSE(is_connected(split));
}

TEST_CASE("rng determinism and shuffle") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.u64() == b.u64());

    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        double x = r.real();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        CHECK(r.uniform(10) < 10);
    }

    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    Rng s1(3), s2(3);
    auto w = v;
    s1.shuffle(v);
    s2.shuffle(w);
    CHECK(v == w);
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});

    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(5, 3) == mix_seed(5, 3));
}

TEST_SUITE_END();
