#include "musae/pmi.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "musae/error.hpp"

namespace musae {

namespace {

// walk-probability matrix times F, W(v,f) = sum_u M(v,u) [f in F_u]
Matrix times_features(const Matrix& m, const FeatureStore& f) {
    Matrix w(m.rows, f.feature_count);
    for (std::size_t v = 0; v < m.rows; ++v) {
        for (std::size_t u = 0; u < m.cols; ++u) {
            double a = m.at(v, u);
            if (a == 0.0) continue;
            for (FeatureId x : f.features_of(static_cast<NodeId>(u)))
                w.data[v * w.cols + x] += a;
        }
    }
    return w;
}

// target entries log(factor * W(v,f) / E_ff) - log b
PmiTarget from_probability(const Matrix& w, const std::vector<double>& e_diag,
                           double factor, double b, std::int32_t scale) {
    PmiTarget target(w.rows, w.cols);
    target.shift = std::log(b);
    target.scale = scale;
    for (std::size_t f = 0; f < w.cols; ++f) {
        bool any = e_diag[f] > 0.0;
        if (!any) ++target.masked_feature_columns;
        for (std::size_t v = 0; v < w.rows; ++v) {
            double p = w.at(v, f);
            if (any && p > 0.0) {
                target.values[v * w.cols + f] = std::log(factor * p / e_diag[f]) - target.shift;
                target.mask[v * w.cols + f] = 1;
            }
        }
    }
    return target;
}

Matrix power(const Matrix& p, std::uint32_t r) {
    Matrix out = p;
    for (std::uint32_t i = 1; i < r; ++i) out = matmul(out, p);
    return out;
}

FeatureStore ego_only(const Graph& g) {
    FeatureStore empty;
    empty.node_count = g.node_count;
    empty.feature_count = 0;
    empty.offsets.assign(g.node_count + 1, 0);
    return ego_augment(empty, g);
}

}  // namespace

PmiTarget musae_target(const DenseView& view, const FeatureStore& f,
                       std::uint32_t r, double b) {
    if (r < 1) throw UsageError("scale must be >= 1");
    if (b < 1) throw UsageError("negative-sample count must be >= 1");
    Matrix w = times_features(power(view.p, r), f);
    return from_probability(w, view.e_diag, static_cast<double>(view.volume), b,
                            static_cast<std::int32_t>(r));
}

PmiTarget ae_target(const DenseView& view, const FeatureStore& f,
                    std::uint32_t t, double b) {
    if (t < 1) throw UsageError("window must be >= 1");
    if (b < 1) throw UsageError("negative-sample count must be >= 1");
    Matrix sum = view.p;
    Matrix pr = view.p;
    for (std::uint32_t r = 2; r <= t; ++r) {
        pr = matmul(pr, view.p);
        for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += pr.data[i];
    }
    Matrix w = times_features(sum, f);
    double factor = static_cast<double>(view.volume) / t;
    return from_probability(w, view.e_diag, factor, b, kPooledScale);
}

PmiTarget deepwalk_target(const Graph& g, std::uint32_t t, double b,
                          std::uint32_t size_cap) {
    FeatureStore ident = ego_only(g);
    return ae_target(dense_view(g, ident, size_cap), ident, t, b);
}

PmiTarget walklets_target(const Graph& g, std::uint32_t r, double b,
                          std::uint32_t size_cap) {
    FeatureStore ident = ego_only(g);
    return musae_target(dense_view(g, ident, size_cap), ident, r, b);
}

PmiTarget ego_musae_target(const Graph& g, const FeatureStore& f, std::uint32_t r,
                           double b, std::uint32_t size_cap) {
    FeatureStore aug = ego_augment(f, g);
    return musae_target(dense_view(g, aug, size_cap), aug, r, b);
}

PmiTarget ego_ae_target(const Graph& g, const FeatureStore& f, std::uint32_t t,
                        double b, std::uint32_t size_cap) {
    FeatureStore aug = ego_augment(f, g);
    return ae_target(dense_view(g, aug, size_cap), aug, t, b);
}

PmiTarget empirical_target(const ScaledCorpus& corpus, const CorpusStats& stats,
                           std::int32_t scale, double b) {
    std::size_t index;
    if (corpus.mode == CorpusMode::Pooled) {
        if (scale != kPooledScale)
            throw UsageError("pooled corpus has no per-scale counts");
        index = 0;
    } else {
        if (scale < 1 || static_cast<std::size_t>(scale) > stats.scales.size())
            throw UsageError("scale out of range");
        index = static_cast<std::size_t>(scale) - 1;
    }
    const ScaleCounts& c = stats.scales.at(index);

    PmiTarget target(corpus.node_count, corpus.feature_count);
    target.shift = std::log(b);
    target.scale = scale;
    for (const auto& [key, cnt] : c.pair) {
        auto v = static_cast<std::size_t>(key >> 32);
        auto f = static_cast<std::size_t>(key & 0xFFFFFFFFu);
        double lift = static_cast<double>(cnt) * static_cast<double>(c.total) /
                      (static_cast<double>(c.node[v]) * static_cast<double>(c.feature[f]));
        target.values[v * target.cols + f] = std::log(lift) - target.shift;
        target.mask[v * target.cols + f] = 1;
    }
    for (std::size_t f = 0; f < corpus.feature_count; ++f)
        if (c.feature[f] == 0) ++target.masked_feature_columns;
    return target;
}

FitReport factorization_fit(const std::vector<double>& g, const std::vector<double>& h,
                            std::size_t dim, std::size_t col_begin, std::size_t col_end,
                            const PmiTarget& target) {
    if (col_end > dim || col_begin >= col_end)
        throw UsageError("bad embedding column block");
    if (g.size() < target.rows * dim || h.size() < target.cols * dim)
        throw UsageError("embedding shape does not cover the target");

    FitReport report;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sse = 0;
    for (std::size_t v = 0; v < target.rows; ++v) {
        for (std::size_t f = 0; f < target.cols; ++f) {
            if (!target.defined(v, f)) continue;
            double x = 0.0;
            const double* gr = g.data() + v * dim;
            const double* hr = h.data() + f * dim;
            for (std::size_t k = col_begin; k < col_end; ++k) x += gr[k] * hr[k];
            double y = target.at(v, f);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            sse += (x - y) * (x - y);
            ++report.entries;
        }
    }
    if (report.entries == 0) throw TaskError("target mask is empty, nothing to fit");
    double n = static_cast<double>(report.entries);
    double cov = sxy - sx * sy / n;
    double vx = sxx - sx * sx / n;
    double vy = syy - sy * sy / n;
    report.pearson = (vx > 0 && vy > 0) ? cov / std::sqrt(vx * vy) : 0.0;
    report.masked_rmse = std::sqrt(sse / n);
    return report;
}

void write_target_csv(const PmiTarget& target, const IdMap& node_ids,
                      std::ostream& out) {
    out << "id";
    for (std::size_t f = 0; f < target.cols; ++f) out << ",f_" << f;
    out << '\n';
    char buf[64];
    for (std::size_t v = 0; v < target.rows; ++v) {
        out << (node_ids.size() == target.rows ? node_ids.name(static_cast<std::uint32_t>(v))
                                               : std::to_string(v));
        for (std::size_t f = 0; f < target.cols; ++f) {
            if (target.defined(v, f)) {
                std::snprintf(buf, sizeof buf, "%.9g", target.at(v, f));
                out << ',' << buf;
            } else {
                out << ",NA";
            }
        }
        out << '\n';
    }
}

}  // namespace musae
