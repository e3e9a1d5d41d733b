#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "musae/corpus.hpp"
#include "musae/graph.hpp"

namespace musae {

inline constexpr std::int32_t kPooledScale = 0;

// Closed-form shifted-PMI matrix. Entries whose pre-log probability is
// zero carry mask=false and are excluded from every comparison; they are
// never materialized as -inf.
struct PmiTarget {
    std::size_t rows = 0, cols = 0;
    std::vector<double> values;
    std::vector<char> mask;
    double shift = 0.0;          // log b
    std::int32_t scale = kPooledScale;  // r, 0 when pooled
    std::uint32_t masked_feature_columns = 0;  // features with no mass at all

    PmiTarget() = default;
    PmiTarget(std::size_t r, std::size_t c)
        : rows(r), cols(c), values(r * c, 0.0), mask(r * c, 0) {}

    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    bool defined(std::size_t i, std::size_t j) const { return mask[i * cols + j] != 0; }
};

// log(c P^r F E^-1) - log b
PmiTarget musae_target(const DenseView& view, const FeatureStore& f,
                       std::uint32_t r, double b);

// log((c/t) (sum_{r=1..t} P^r) F E^-1) - log b
PmiTarget ae_target(const DenseView& view, const FeatureStore& f,
                    std::uint32_t t, double b);

// The identity-feature (F = I) reductions; E then equals D.
PmiTarget deepwalk_target(const Graph& g, std::uint32_t t, double b,
                          std::uint32_t size_cap = kDefaultOracleCap);
PmiTarget walklets_target(const Graph& g, std::uint32_t r, double b,
                          std::uint32_t size_cap = kDefaultOracleCap);

// Targets over the augmented store [F; I]; columns q..q+n-1 are the
// node-identity block and E is recomputed over the augmented matrix.
PmiTarget ego_musae_target(const Graph& g, const FeatureStore& f, std::uint32_t r,
                           double b, std::uint32_t size_cap = kDefaultOracleCap);
PmiTarget ego_ae_target(const Graph& g, const FeatureStore& f, std::uint32_t t,
                        double b, std::uint32_t size_cap = kDefaultOracleCap);

// log(#(v,f) |D| / (#(v) #(f))) - log b from exact corpus counts.
// scale is 1-based for multiscale corpora, kPooledScale for pooled ones.
PmiTarget empirical_target(const ScaledCorpus& corpus, const CorpusStats& stats,
                           std::int32_t scale, double b);

struct FitReport {
    double pearson = 0.0;
    double masked_rmse = 0.0;
    std::uint64_t entries = 0;
};

// Fit between dot products g_v . h_f (restricted to the given column
// block) and target values, over masked-true entries only.
FitReport factorization_fit(const std::vector<double>& g, const std::vector<double>& h,
                            std::size_t dim, std::size_t col_begin, std::size_t col_end,
                            const PmiTarget& target);

// CSV with `NA` for masked entries; row ids from the graph id map,
// columns f_0..f_{q-1}.
void write_target_csv(const PmiTarget& target, const IdMap& node_ids,
                      std::ostream& out);

}  // namespace musae
