#include "musae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>
#include <omp.h>

#include "musae/error.hpp"

namespace musae {

void TrainConfig::validate() const {
    if (dim < 1) throw UsageError("dim must be >= 1");
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (negatives < 1) throw UsageError("negatives must be >= 1");
    if (window < 1) throw UsageError("window must be >= 1");
    if (window >= walk_length)
        throw UsageError("window must be smaller than the walk length");
    if (!(lr_min > 0.0) || !(lr_min <= lr_max))
        throw UsageError("need 0 < lr-min <= lr-max");
    if (mode == EmbedMode::MUSAE && dim % window != 0)
        throw UsageError("musae mode needs the window to divide dim (got dim=" +
                         std::to_string(dim) + ", window=" + std::to_string(window) + ")");
    if (neg_exponent < 0.0) throw UsageError("neg-exponent must be >= 0");
    if (threads < 1) throw UsageError("threads must be >= 1");
}

EmbeddingSet init_embeddings(std::uint32_t n, std::uint32_t q, std::uint32_t d,
                             std::uint64_t seed) {
    if (n < 1 || q < 1 || d < 1) throw UsageError("embedding shape must be positive");
    EmbeddingSet emb;
    emb.node_count = n;
    emb.feature_count = q;
    emb.dim = d;
    emb.g.resize(static_cast<std::size_t>(n) * d);
    emb.h.resize(static_cast<std::size_t>(q) * d);
    Rng rng(mix_seed(seed, 0x1E17));
    double inv = 1.0 / d;
    for (double& x : emb.g) x = (rng.real() - 0.5) * inv;
    for (double& x : emb.h) x = (rng.real() - 0.5) * inv;
    emb.blocks = {{0, d}};
    return emb;
}

double lr_at(double progress, const TrainConfig& config) {
    return config.lr_max + progress * (config.lr_min - config.lr_max);
}

NegativeSampler NegativeSampler::from_counts(const std::vector<std::uint64_t>& counts,
                                             double exponent) {
    NegativeSampler s;
    const std::size_t q = counts.size();
    s.weight_.assign(q, 0.0);
    double acc = 0.0;
    for (std::size_t f = 0; f < q; ++f) {
        if (counts[f] > 0) {
            s.weight_[f] = std::pow(static_cast<double>(counts[f]), exponent);
            acc += s.weight_[f];
        }
    }
    if (acc <= 0.0) throw TaskError("corpus has no feature occurrences to sample from");
    for (double& w : s.weight_) w /= acc;

    s.prob_.assign(q, 1.0);
    s.alias_.assign(q, 0);
    std::vector<double> scaled(q);
    std::vector<std::uint32_t> small, large;
    for (std::size_t f = 0; f < q; ++f) {
        scaled[f] = s.weight_[f] * static_cast<double>(q);
        (scaled[f] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(f));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t lo = small.back();
        std::uint32_t hi = large.back();
        small.pop_back();
        s.prob_[lo] = scaled[lo];
        s.alias_[lo] = hi;
        scaled[hi] -= 1.0 - scaled[lo];
        if (scaled[hi] < 1.0) {
            large.pop_back();
            small.push_back(hi);
        }
    }
    // leftovers are 1.0 up to rounding; zero-weight buckets must stay closed
    for (std::uint32_t f : small)
        if (s.weight_[f] == 0.0) s.prob_[f] = 0.0;
    return s;
}

FeatureId NegativeSampler::sample(Rng& rng) const {
    auto i = static_cast<std::size_t>(rng.uniform(prob_.size()));
    return rng.real() < prob_[i] ? static_cast<FeatureId>(i) : alias_[i];
}

double NegativeSampler::probability(FeatureId f) const { return weight_[f]; }

namespace {

inline double clamped_sigmoid(double x) {
    if (x > 6.0) x = 6.0;
    if (x < -6.0) x = -6.0;
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

void sgd_pair_update(double* g_v, EmbeddingSet& emb, FeatureId f,
                     const NegativeSampler& sampler, std::uint32_t b,
                     double alpha, std::uint32_t col_begin, std::uint32_t col_end,
                     Rng& rng, bool freeze_h) {
    const std::uint32_t width = col_end - col_begin;
    static thread_local std::vector<double> grad;
    grad.assign(width, 0.0);

    double* gv = g_v + col_begin;
    for (std::uint32_t k = 0; k <= b; ++k) {
        FeatureId target = k == 0 ? f : sampler.sample(rng);
        double label = k == 0 ? 1.0 : 0.0;
        double* h = emb.h_row(target) + col_begin;
        double dot = 0.0;
        for (std::uint32_t i = 0; i < width; ++i) dot += gv[i] * h[i];
        double coef = alpha * (label - clamped_sigmoid(dot));
        for (std::uint32_t i = 0; i < width; ++i) grad[i] += coef * h[i];
        if (!freeze_h)
            for (std::uint32_t i = 0; i < width; ++i) h[i] += coef * gv[i];
    }
    for (std::uint32_t i = 0; i < width; ++i) gv[i] += grad[i];
}

namespace {

void train_one_corpus(EmbeddingSet& emb, const ScaleCorpus& sc,
                      const TrainConfig& config, ScaleBlock block,
                      std::uint32_t ordinal, bool freeze_h) {
    const std::uint64_t total = sc.size();
    if (total == 0) return;

    std::vector<std::uint64_t> counts(emb.feature_count, 0);
    for (std::uint64_t i = 0; i < total; ++i) ++counts[sc.pair(i).feature];
    NegativeSampler sampler = NegativeSampler::from_counts(counts, config.neg_exponent);

    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    Rng shuffle_rng(mix_seed(config.seed, 0xC000 + ordinal));
    const double grand_total = static_cast<double>(config.epochs) * total;

    // scales of a multiscale run already occupy the threads, so pair-level
    // parallelism applies to pooled corpora only
    int threads = config.mode == EmbedMode::AE ? config.threads : 1;

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        std::uint64_t epoch_base = static_cast<std::uint64_t>(epoch) * total;
        if (threads == 1) {
            Rng rng(mix_seed(config.seed, 0xA000 + ordinal * 131 + epoch));
            for (std::uint64_t i = 0; i < total; ++i) {
                double alpha = lr_at((epoch_base + i) / grand_total, config);
                NodeFeaturePair p = sc.pair(order[i]);
                sgd_pair_update(emb.g_row(p.node), emb, p.feature, sampler,
                                config.negatives, alpha, block.begin, block.end,
                                rng, freeze_h);
            }
        } else {
            // Hogwild: threads share the matrices without synchronization
#pragma omp parallel num_threads(threads)
            {
                int tid = omp_get_thread_num();
                int nt = omp_get_num_threads();
                std::uint64_t chunk = (total + nt - 1) / nt;
                std::uint64_t begin = tid * chunk;
                std::uint64_t end = std::min(total, begin + chunk);
                Rng rng(mix_seed(config.seed,
                                 0xB000 + (ordinal * 131 + epoch) * 257 + tid));
                for (std::uint64_t i = begin; i < end; ++i) {
                    double alpha = lr_at((epoch_base + i) / grand_total, config);
                    NodeFeaturePair p = sc.pair(order[i]);
                    sgd_pair_update(emb.g_row(p.node), emb, p.feature, sampler,
                                    config.negatives, alpha, block.begin, block.end,
                                    rng, freeze_h);
                }
            }
        }
    }
}

}  // namespace

EmbeddingSet train(const ScaledCorpus& corpus, const TrainConfig& config,
                   const EmbeddingSet* frozen_h) {
    config.validate();
    bool pooled = corpus.mode == CorpusMode::Pooled;
    if (pooled != (config.mode == EmbedMode::AE))
        throw UsageError("corpus mode does not match the training mode");
    if (!pooled && corpus.window != config.window)
        throw UsageError("corpus was built with a different window");
    if (corpus.node_count < 1 || corpus.feature_count < 1)
        throw UsageError("corpus has no nodes or no features");

    EmbeddingSet emb = init_embeddings(corpus.node_count, corpus.feature_count,
                                       config.dim, config.seed);
    if (config.mode == EmbedMode::MUSAE) {
        emb.blocks.clear();
        std::uint32_t w = config.scale_width();
        for (std::uint32_t r = 0; r < config.window; ++r)
            emb.blocks.push_back({r * w, (r + 1) * w});
    }

    if (frozen_h) {
        if (frozen_h->feature_count != emb.feature_count ||
            frozen_h->dim != emb.dim)
            throw UsageError("frozen feature embeddings have a different shape");
        if (frozen_h->blocks.size() != emb.blocks.size())
            throw UsageError("frozen feature embeddings have different scale blocks");
        emb.h = frozen_h->h;
    }

    if (pooled) {
        train_one_corpus(emb, corpus.scales[0], config, emb.blocks[0], 0,
                         frozen_h != nullptr);
    } else {
        int scale_threads = std::min<int>(config.threads,
                                          static_cast<int>(corpus.scales.size()));
#pragma omp parallel for schedule(static) num_threads(scale_threads)
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(corpus.scales.size()); ++r)
            train_one_corpus(emb, corpus.scales[r], config, emb.blocks[r],
                             static_cast<std::uint32_t>(r), frozen_h != nullptr);
    }
    return emb;
}

double sgns_objective(const EmbeddingSet& emb, const std::vector<NodeFeaturePair>& pairs,
                      const NegativeSampler& sampler, std::uint32_t b,
                      std::uint32_t col_begin, std::uint32_t col_end,
                      std::uint64_t seed) {
    if (pairs.empty()) throw UsageError("no pairs to evaluate");
    Rng rng(seed);
    double sum = 0.0;
    for (const NodeFeaturePair& p : pairs) {
        const double* gv = emb.g_row(p.node) + col_begin;
        const double* hf = emb.h_row(p.feature) + col_begin;
        double dot = 0.0;
        for (std::uint32_t i = 0; i < col_end - col_begin; ++i) dot += gv[i] * hf[i];
        sum += std::log(clamped_sigmoid(dot));
        for (std::uint32_t k = 0; k < b; ++k) {
            const double* hn = emb.h_row(sampler.sample(rng)) + col_begin;
            double nd = 0.0;
            for (std::uint32_t i = 0; i < col_end - col_begin; ++i) nd += gv[i] * hn[i];
            sum += std::log(clamped_sigmoid(-nd));
        }
    }
    return sum / static_cast<double>(pairs.size());
}

void write_embedding_csv(const std::vector<double>& rows, std::size_t dim,
                         const std::vector<std::string>& ids, std::ostream& out) {
    out << "id";
    for (std::size_t k = 0; k < dim; ++k) out << ",x_" << k;
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i];
        for (std::size_t k = 0; k < dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.9g", rows[i * dim + k]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::vector<double> read_embedding_csv(std::istream& in, std::size_t& dim,
                                       std::vector<std::string>& ids) {
    std::string line;
    if (!std::getline(in, line)) throw TaskError("embedding file is empty");
    dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    ids.clear();
    std::vector<double> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw TaskError("bad embedding row");
        ids.push_back(cell);
        std::size_t k = 0;
        while (std::getline(ss, cell, ',')) {
            rows.push_back(std::stod(cell));
            ++k;
        }
        if (k != dim) throw TaskError("embedding row has wrong width");
    }
    return rows;
}

void write_sidecar(const TrainConfig& config, const EmbeddingSet& emb,
                   const IdMap& node_ids, std::ostream& out) {
    nlohmann::json j;
    j["config"] = {
        {"dim", config.dim},
        {"walk_length", config.walk_length},
        {"walks_per_node", config.walks_per_node},
        {"epochs", config.epochs},
        {"window", config.window},
        {"negatives", config.negatives},
        {"lr_max", config.lr_max},
        {"lr_min", config.lr_min},
        {"mode", config.mode == EmbedMode::AE ? "ae" : "musae"},
        {"ego", config.ego},
        {"neg_exponent", config.neg_exponent},
        {"threads", config.threads},
    };
    j["seed"] = config.seed;
    j["node_count"] = emb.node_count;
    j["feature_count"] = emb.feature_count;
    j["scale_blocks"] = nlohmann::json::array();
    for (const ScaleBlock& blk : emb.blocks)
        j["scale_blocks"].push_back({{"begin", blk.begin}, {"end", blk.end}});
    j["node_ids"] = node_ids.names();
    out << j.dump(2) << '\n';
}

}  // namespace musae
