#include "musae/corpus.hpp"

#include <ostream>

#include "musae/error.hpp"

namespace musae {

namespace {

// Shared two-pass builder. Pooled mode funnels every scale into output
// corpus 0; multiscale keeps them apart.
ScaledCorpus build(const WalkSet& walks, const FeatureStore& features,
                   std::uint32_t window, int threads, CorpusMode mode) {
    if (window < 1) throw UsageError("window must be >= 1");
    if (window >= walks.walk_length)
        throw UsageError("window (" + std::to_string(window) +
                         ") must be smaller than the walk length (" +
                         std::to_string(walks.walk_length) + ")");

    const std::uint32_t t = window;
    const std::uint32_t l = walks.walk_length;
    const std::uint64_t w = walks.walk_count;
    const std::size_t out_count = mode == CorpusMode::Pooled ? 1 : t;

    ScaledCorpus out;
    out.mode = mode;
    out.window = t;
    out.node_count = features.node_count;
    out.feature_count = features.feature_count;
    out.scales.resize(out_count);

    // pass 1: per-walk pair counts per output corpus and direction
    std::vector<std::uint64_t> fwd_counts(w * out_count, 0);
    std::vector<std::uint64_t> bwd_counts(w * out_count, 0);
    std::vector<std::uint64_t> skipped(w, 0);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(w); ++i) {
        auto walk = walks.walk(i);
        for (std::uint32_t j = 0; j + t < l; ++j) {
            std::uint64_t src = features.features_of(walk[j]).size();
            for (std::uint32_t r = 1; r <= t; ++r) {
                std::uint64_t dst = features.features_of(walk[j + r]).size();
                std::size_t o = mode == CorpusMode::Pooled ? 0 : r - 1;
                fwd_counts[i * out_count + o] += dst;
                bwd_counts[i * out_count + o] += src;
                if (dst == 0) ++skipped[i];
                if (src == 0) ++skipped[i];
            }
        }
    }

    // prefix sums give each walk its slot range per corpus
    std::vector<std::uint64_t> fwd_offset(w * out_count), bwd_offset(w * out_count);
    for (std::size_t o = 0; o < out_count; ++o) {
        std::uint64_t facc = 0, bacc = 0;
        for (std::uint64_t i = 0; i < w; ++i) {
            fwd_offset[i * out_count + o] = facc;
            bwd_offset[i * out_count + o] = bacc;
            facc += fwd_counts[i * out_count + o];
            bacc += bwd_counts[i * out_count + o];
        }
        out.scales[o].forward.resize(facc);
        out.scales[o].backward.resize(bacc);
    }
    for (std::uint64_t s : skipped) out.skipped_empty_feature_slots += s;

    // pass 2: fill
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(w); ++i) {
        auto walk = walks.walk(i);
        std::vector<std::uint64_t> fcur(out_count), bcur(out_count);
        for (std::size_t o = 0; o < out_count; ++o) {
            fcur[o] = fwd_offset[i * out_count + o];
            bcur[o] = bwd_offset[i * out_count + o];
        }
        for (std::uint32_t j = 0; j + t < l; ++j) {
            NodeId vj = walk[j];
            auto src_features = features.features_of(vj);
            for (std::uint32_t r = 1; r <= t; ++r) {
                NodeId vjr = walk[j + r];
                std::size_t o = mode == CorpusMode::Pooled ? 0 : r - 1;
                for (FeatureId f : features.features_of(vjr))
                    out.scales[o].forward[fcur[o]++] = {vj, f};
                for (FeatureId f : src_features)
                    out.scales[o].backward[bcur[o]++] = {vjr, f};
            }
        }
    }
    return out;
}

}  // namespace

ScaledCorpus build_pooled(const WalkSet& walks, const FeatureStore& features,
                          std::uint32_t window, int threads) {
    return build(walks, features, window, threads, CorpusMode::Pooled);
}

ScaledCorpus build_multiscale(const WalkSet& walks, const FeatureStore& features,
                              std::uint32_t window, int threads) {
    return build(walks, features, window, threads, CorpusMode::Multiscale);
}

CorpusStats corpus_stats(const ScaledCorpus& corpus) {
    CorpusStats stats;
    stats.scales.resize(corpus.scales.size());
    for (std::size_t s = 0; s < corpus.scales.size(); ++s) {
        const ScaleCorpus& sc = corpus.scales[s];
        ScaleCounts& c = stats.scales[s];
        c.node.assign(corpus.node_count, 0);
        c.feature.assign(corpus.feature_count, 0);
        for (auto [v, f] : sc.forward) {
            ++c.node[v];
            ++c.feature[f];
            ++c.pair[ScaleCounts::key(v, f)];
            ++c.forward_pair[ScaleCounts::key(v, f)];
        }
        for (auto [v, f] : sc.backward) {
            ++c.node[v];
            ++c.feature[f];
            ++c.pair[ScaleCounts::key(v, f)];
            ++c.backward_pair[ScaleCounts::key(v, f)];
        }
        c.forward_total = sc.forward.size();
        c.backward_total = sc.backward.size();
        c.total = sc.size();
    }
    return stats;
}

void write_corpus(const ScaledCorpus& corpus, std::size_t scale_index,
                  std::ostream& out) {
    const ScaleCorpus& sc = corpus.scales.at(scale_index);
    for (std::uint64_t i = 0; i < sc.size(); ++i) {
        auto [v, f] = sc.pair(i);
        out << v << ' ' << f << '\n';
    }
}

}  // namespace musae
