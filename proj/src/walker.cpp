#include "musae/walker.hpp"

#include <algorithm>
#include <ostream>

#include <omp.h>

#include "musae/error.hpp"
#include "musae/rng.hpp"

namespace musae {

std::vector<NodeId> sample_start_nodes(const Graph& g, std::uint64_t s,
                                       std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    std::vector<NodeId> starts(s);
    for (std::uint64_t i = 0; i < s; ++i) {
        // offsets is the cumulative degree array, so a uniform draw over
        // [0, c) lands in node v with probability deg(v)/c
        std::uint64_t x = rng.uniform(g.volume);
        auto it = std::upper_bound(g.offsets.begin(), g.offsets.end(), x);
        starts[i] = static_cast<NodeId>((it - g.offsets.begin()) - 1);
    }
    return starts;
}

namespace {

void walk_into(const Graph& g, NodeId start, std::uint32_t l,
               std::uint64_t rng_seed, NodeId* out) {
    Rng rng(rng_seed);
    NodeId v = start;
    out[0] = v;
    for (std::uint32_t j = 1; j < l; ++j) {
        auto nb = g.neighbors_of(v);
        v = nb[rng.uniform(nb.size())];
        out[j] = v;
    }
}

}  // namespace

std::vector<NodeId> random_walk(const Graph& g, NodeId start, std::uint32_t l,
                                std::uint64_t rng_seed) {
    if (l < 1) throw UsageError("walk length must be >= 1");
    if (g.degree(start) == 0) throw TaskError("walk started on an isolated node");
    std::vector<NodeId> walk(l);
    walk_into(g, start, l, rng_seed, walk.data());
    return walk;
}

WalkSet generate_walks(const Graph& g, WalkRegime regime, std::uint64_t count,
                       std::uint32_t walk_length, std::uint64_t seed,
                       int threads) {
    if (walk_length < 1) throw UsageError("walk length must be >= 1");

    WalkSet ws;
    ws.walk_length = walk_length;
    ws.regime = regime;
    ws.seed = seed;

    std::vector<NodeId> starts;
    if (regime == WalkRegime::PerNode) {
        ws.walk_count = static_cast<std::uint64_t>(g.node_count) * count;
        starts.resize(ws.walk_count);
        for (std::uint64_t i = 0; i < ws.walk_count; ++i)
            starts[i] = static_cast<NodeId>(i / count);
    } else {
        ws.walk_count = count;
        starts = sample_start_nodes(g, count, mix_seed(seed, 0));
    }

    ws.nodes.resize(ws.walk_count * walk_length);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ws.walk_count); ++i)
        walk_into(g, starts[i], walk_length, mix_seed(seed, 1 + i),
                  ws.nodes.data() + i * walk_length);
    return ws;
}

void write_walks(const WalkSet& walks, std::ostream& out) {
    for (std::uint64_t i = 0; i < walks.walk_count; ++i) {
        auto w = walks.walk(i);
        for (std::uint32_t j = 0; j < walks.walk_length; ++j) {
            if (j) out << ' ';
            out << w[j];
        }
        out << '\n';
    }
}

}  // namespace musae
