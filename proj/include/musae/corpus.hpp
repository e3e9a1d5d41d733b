#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "musae/graph.hpp"
#include "musae/walker.hpp"

namespace musae {

struct NodeFeaturePair {
    NodeId node;
    FeatureId feature;

    friend bool operator==(NodeFeaturePair a, NodeFeaturePair b) {
        return a.node == b.node && a.feature == b.feature;
    }
    friend bool operator<(NodeFeaturePair a, NodeFeaturePair b) {
        return a.node != b.node ? a.node < b.node : a.feature < b.feature;
    }
};

enum class CorpusMode { Pooled, Multiscale };

// One training multiset. Forward pairs pair a source node with a feature
// seen r steps ahead; backward pairs pair the node r steps ahead with a
// feature of the source. Their concatenation is the multiset D_r.
struct ScaleCorpus {
    std::vector<NodeFeaturePair> forward;
    std::vector<NodeFeaturePair> backward;

    std::uint64_t size() const { return forward.size() + backward.size(); }
    NodeFeaturePair pair(std::uint64_t i) const {
        return i < forward.size() ? forward[i] : backward[i - forward.size()];
    }
};

// Pooled mode holds one corpus with every scale's pairs; multiscale mode
// holds window corpora, scales[r-1] = D_r. Immutable once built.
struct ScaledCorpus {
    CorpusMode mode = CorpusMode::Pooled;
    std::uint32_t window = 0;  // t
    std::uint32_t node_count = 0;
    std::uint32_t feature_count = 0;
    std::vector<ScaleCorpus> scales;
    std::uint64_t skipped_empty_feature_slots = 0;

    std::uint64_t total_pairs() const {
        std::uint64_t s = 0;
        for (const auto& sc : scales) s += sc.size();
        return s;
    }
};

// Walk positions run j = 1..l-t; for r = 1..t the slot contributes
// (v_j, f) for f on v_{j+r} and (v_{j+r}, f) for f on v_j. Builds are
// parallel over walks into pre-assigned ranges, so the result does not
// depend on the thread count.
ScaledCorpus build_pooled(const WalkSet& walks, const FeatureStore& features,
                          std::uint32_t window, int threads = 1);
ScaledCorpus build_multiscale(const WalkSet& walks, const FeatureStore& features,
                              std::uint32_t window, int threads = 1);

// Exact multiset counts for one corpus, keyed (node << 32) | feature.
struct ScaleCounts {
    std::vector<std::uint64_t> node;     // #(v)
    std::vector<std::uint64_t> feature;  // #(f)
    std::unordered_map<std::uint64_t, std::uint64_t> pair;
    std::uint64_t total = 0;  // |D|

    std::unordered_map<std::uint64_t, std::uint64_t> forward_pair;
    std::unordered_map<std::uint64_t, std::uint64_t> backward_pair;
    std::uint64_t forward_total = 0;
    std::uint64_t backward_total = 0;

    static std::uint64_t key(NodeId v, FeatureId f) {
        return (static_cast<std::uint64_t>(v) << 32) | f;
    }
    std::uint64_t pair_count(NodeId v, FeatureId f) const {
        auto it = pair.find(key(v, f));
        return it == pair.end() ? 0 : it->second;
    }
    std::uint64_t forward_count(NodeId v, FeatureId f) const {
        auto it = forward_pair.find(key(v, f));
        return it == forward_pair.end() ? 0 : it->second;
    }
    std::uint64_t backward_count(NodeId v, FeatureId f) const {
        auto it = backward_pair.find(key(v, f));
        return it == backward_pair.end() ? 0 : it->second;
    }
};

struct CorpusStats {
    std::vector<ScaleCounts> scales;  // parallel to corpus.scales
};

CorpusStats corpus_stats(const ScaledCorpus& corpus);

// Lines `node_id feature_id` for one corpus of the set.
void write_corpus(const ScaledCorpus& corpus, std::size_t scale_index,
                  std::ostream& out);

}  // namespace musae
