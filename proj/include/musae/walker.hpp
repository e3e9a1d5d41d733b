#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "musae/graph.hpp"

namespace musae {

enum class WalkRegime { PerNode, Sampled };

// Fixed-length first-order random walks, stored back to back.
// Immutable after generation.
struct WalkSet {
    std::uint32_t walk_length = 0;
    std::uint64_t walk_count = 0;
    WalkRegime regime = WalkRegime::PerNode;
    std::uint64_t seed = 0;
    std::vector<NodeId> nodes;  // walk_count * walk_length

    std::span<const NodeId> walk(std::uint64_t i) const {
        return {nodes.data() + i * walk_length, walk_length};
    }
};

// i.i.d. draws with Prob(v) = deg(v) / c.
std::vector<NodeId> sample_start_nodes(const Graph& g, std::uint64_t s,
                                       std::uint64_t rng_seed);

// v_1 = start, v_{j+1} uniform over the neighbors of v_j.
std::vector<NodeId> random_walk(const Graph& g, NodeId start, std::uint32_t l,
                                std::uint64_t rng_seed);

// PerNode: p walks from every node in index order (walk i*p+k starts at
// node i). Sampled: s degree-proportional starts. Per-walk sub-seeds are
// derived from (seed, walk ordinal), so generation parallelizes without
// changing the output.
WalkSet generate_walks(const Graph& g, WalkRegime regime, std::uint64_t count,
                       std::uint32_t walk_length, std::uint64_t seed,
                       int threads = 1);

// One walk per line, space-separated dense node indices.
void write_walks(const WalkSet& walks, std::ostream& out);

}  // namespace musae
