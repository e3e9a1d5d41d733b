#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "musae/corpus.hpp"
#include "musae/graph.hpp"
#include "musae/rng.hpp"

namespace musae {

enum class EmbedMode { AE, MUSAE };

struct TrainConfig {
    std::uint32_t dim = 128;          // d
    std::uint32_t walk_length = 80;   // l
    std::uint32_t walks_per_node = 10;
    std::uint32_t epochs = 5;
    std::uint32_t window = 3;         // t
    std::uint32_t negatives = 5;      // b
    double lr_max = 0.05;
    double lr_min = 0.025;
    EmbedMode mode = EmbedMode::AE;
    bool ego = false;
    double neg_exponent = 0.75;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;  // UsageError on bad combinations
    std::uint32_t scale_width() const {
        return mode == EmbedMode::MUSAE ? dim / window : dim;
    }
};

struct ScaleBlock {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
};

// Node rows G (n x d) and feature rows H (q x d), row major. In MUSAE
// mode block r-1 holds the columns trained on D_r.
struct EmbeddingSet {
    std::uint32_t node_count = 0;
    std::uint32_t feature_count = 0;
    std::uint32_t dim = 0;
    std::vector<double> g;
    std::vector<double> h;
    std::vector<ScaleBlock> blocks;

    double* g_row(NodeId v) { return g.data() + static_cast<std::size_t>(v) * dim; }
    double* h_row(FeatureId f) { return h.data() + static_cast<std::size_t>(f) * dim; }
    const double* g_row(NodeId v) const { return g.data() + static_cast<std::size_t>(v) * dim; }
    const double* h_row(FeatureId f) const { return h.data() + static_cast<std::size_t>(f) * dim; }
};

// Entries i.i.d. uniform in [-0.5/d, +0.5/d].
EmbeddingSet init_embeddings(std::uint32_t n, std::uint32_t q, std::uint32_t d,
                             std::uint64_t seed);

// alpha_max + progress * (alpha_min - alpha_max)
double lr_at(double progress, const TrainConfig& config);

// Draws features proportional to count^exponent; zero-count features are
// never drawn.
class NegativeSampler {
public:
    static NegativeSampler from_counts(const std::vector<std::uint64_t>& counts,
                                       double exponent);
    FeatureId sample(Rng& rng) const;
    double probability(FeatureId f) const;  // for the objective, not sampling

private:
    // Vose alias table; draws cost O(1) regardless of the feature count.
    std::vector<double> prob_;
    std::vector<FeatureId> alias_;
    std::vector<double> weight_;  // normalized count^exponent
};

// One positive update plus b negative updates on a (node, feature) pair.
// Dot products are clamped to [-6, 6] before the sigmoid. The node-row
// gradient accumulates across all b+1 terms against the pre-update
// feature rows and is applied once at the end. freeze_h skips every
// feature-row write.
void sgd_pair_update(double* g_v, EmbeddingSet& emb, FeatureId f,
                     const NegativeSampler& sampler, std::uint32_t b,
                     double alpha, std::uint32_t col_begin, std::uint32_t col_end,
                     Rng& rng, bool freeze_h);

// Pooled: one SGNS run over the whole corpus at full width. Multiscale:
// one independent run per sub-corpus at width d/t, written into its
// column block. The learning rate decays linearly over each run's total
// pair count; the pair order is reshuffled every epoch from the seed.
// frozen_h, when given, supplies H, which is never mutated.
EmbeddingSet train(const ScaledCorpus& corpus, const TrainConfig& config,
                   const EmbeddingSet* frozen_h = nullptr);

// Mean of log sigma(g.h) + sum over b seeded negative draws of
// log sigma(-g.h_neg) across the given pairs.
double sgns_objective(const EmbeddingSet& emb, const std::vector<NodeFeaturePair>& pairs,
                      const NegativeSampler& sampler, std::uint32_t b,
                      std::uint32_t col_begin, std::uint32_t col_end,
                      std::uint64_t seed);

// CSV `id,x_0,...,x_{d-1}`, 9 significant digits. Node ids come from the
// id map; feature rows use the dense feature index as their id.
void write_embedding_csv(const std::vector<double>& rows, std::size_t dim,
                         const std::vector<std::string>& ids, std::ostream& out);
std::vector<double> read_embedding_csv(std::istream& in, std::size_t& dim,
                                       std::vector<std::string>& ids);

// JSON sidecar recording the config, seed, scale blocks and id maps.
void write_sidecar(const TrainConfig& config, const EmbeddingSet& emb,
                   const IdMap& node_ids, std::ostream& out);

}  // namespace musae
