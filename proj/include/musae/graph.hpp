#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace musae {

using NodeId = std::uint32_t;
using FeatureId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// External string id <-> dense index, in first-appearance order.
class IdMap {
public:
    std::uint32_t intern(const std::string& key);
    std::int64_t find(const std::string& key) const;
    const std::string& name(std::uint32_t index) const { return names_[index]; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::string> names_;
};

// Simple undirected graph, CSR adjacency with sorted neighbor lists.
// Immutable after construction.
struct Graph {
    std::uint32_t node_count = 0;
    std::vector<std::uint64_t> offsets;   // node_count + 1
    std::vector<NodeId> neighbors;        // sorted within each node
    std::vector<std::uint32_t> degrees;
    std::uint64_t volume = 0;             // sum of degrees = 2|E|
    IdMap ids;

    // ingestion diagnostics
    std::uint64_t self_loops_dropped = 0;
    std::uint64_t duplicate_edges_merged = 0;

    std::uint32_t degree(NodeId v) const { return degrees[v]; }
    std::uint64_t edge_count() const { return volume / 2; }

    std::span<const NodeId> neighbors_of(NodeId v) const {
        return {neighbors.data() + offsets[v],
                neighbors.data() + offsets[v + 1]};
    }

    bool has_edge(NodeId u, NodeId v) const;
    std::vector<Edge> edges() const;  // u < v, sorted
};

struct LoadOptions {
    bool allow_isolated = false;
};

// Builds CSR from a raw (possibly duplicated, possibly self-looped) edge
// list over [0, node_count). Loaders and generators funnel through here.
Graph build_graph(std::uint32_t node_count, std::vector<Edge> raw_edges,
                  IdMap ids = {}, const LoadOptions& opts = {});

// CSV with header `id_1,id_2` or whitespace pairs; `#` comments.
Graph load_edge_list(std::istream& in, const LoadOptions& opts = {});
void write_edge_list(const Graph& g, std::ostream& out);

// Binary node->feature incidence (the matrix F). Feature ids are dense
// indices in [0, feature_count); per-node lists sorted and deduplicated.
struct FeatureStore {
    std::uint32_t node_count = 0;
    std::uint32_t feature_count = 0;      // q
    std::vector<std::uint64_t> offsets;   // node_count + 1
    std::vector<FeatureId> items;
    std::uint64_t total_incidence = 0;    // m
    std::uint32_t nodes_missing_in_input = 0;

    std::span<const FeatureId> features_of(NodeId v) const {
        return {items.data() + offsets[v], items.data() + offsets[v + 1]};
    }
    bool has_feature(NodeId v, FeatureId f) const;
};

FeatureStore feature_store_from_lists(std::vector<std::vector<FeatureId>> lists,
                                      std::uint32_t feature_count_hint = 0);

// JSON object: node-id string -> array of nonnegative integer feature ids.
FeatureStore load_features(std::istream& in, const Graph& g);

// Appends one unique feature per node ([F; I]): feature_count becomes
// q + n and node v additionally holds feature q + v.
FeatureStore ego_augment(const FeatureStore& f, const Graph& g);

// Drops every incidence of feature f; feature_count is unchanged.
FeatureStore remove_feature(const FeatureStore& f, FeatureId feature);

bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);

inline constexpr std::uint32_t kDefaultOracleCap = 10000;

// Row-major dense matrix, double precision. Oracle-scale only.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix matmul(const Matrix& a, const Matrix& b);

// Dense linear-algebra view: P = D^-1 A (row stochastic), E = diag(1^T D F),
// D diagonal, plus the graph volume c.
struct DenseView {
    Matrix p;                       // n x n
    std::vector<double> e_diag;     // length q
    std::vector<double> d_diag;     // length n
    std::uint64_t volume = 0;
    std::uint32_t node_count = 0;
    std::uint32_t feature_count = 0;
};

DenseView dense_view(const Graph& g, const FeatureStore& f,
                     std::uint32_t size_cap = kDefaultOracleCap);

struct SyntheticGraph {
    Graph graph;
    FeatureStore features;
    std::vector<std::uint32_t> communities;  // empty unless block model
};

// Erdos-Renyi-style generator: each node initiates `edges_per_node` edges
// to uniform partners (expected degree ~ 2*edges_per_node); per-node
// features drawn uniformly without replacement from [0, feature_pool).
// Otherwise-isolated nodes are attached to one uniform random partner.
SyntheticGraph generate_erdos_renyi(std::uint32_t n, std::uint32_t edges_per_node,
                                    std::uint32_t feature_pool,
                                    std::uint32_t features_per_node,
                                    std::uint64_t seed);

struct SbmConfig {
    std::uint32_t nodes_per_community = 500;
    std::uint32_t communities = 2;
    double p_in = 0.05;
    double p_out = 0.005;
    std::uint32_t features_per_node = 4;
    std::uint32_t pool_per_community = 16;
    double community_bias = 0.9;  // probability a feature comes from the own-community pool slice
};

// Two-level stochastic block model with community-coupled features.
// Feature pool is partitioned into per-community slices of equal size;
// q = communities * pool_per_community.
SyntheticGraph generate_sbm(const SbmConfig& cfg, std::uint64_t seed);

}  // namespace musae
