#include "musae/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_set>

#include "musae/corpus.hpp"
#include "musae/error.hpp"
#include "musae/rng.hpp"
#include "musae/walker.hpp"

namespace musae {

namespace {

void check_fraction(double fraction) {
    if (!(fraction > 0.0) || !(fraction < 1.0))
        throw UsageError("split fraction must lie strictly between 0 and 1");
}

ScaledCorpus corpus_for(const WalkSet& walks, const FeatureStore& features,
                        const TrainConfig& config) {
    return config.mode == EmbedMode::MUSAE ? build_multiscale(walks, features, config.window)
                                           : build_pooled(walks, features, config.window);
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

ScoreSeries summarize(std::vector<double> per_seed) {
    ScoreSeries s;
    s.mean = mean_of(per_seed);
    if (per_seed.size() > 1) {
        double ss = 0.0;
        for (double v : per_seed) ss += (v - s.mean) * (v - s.mean);
        double sd = std::sqrt(ss / static_cast<double>(per_seed.size() - 1));
        s.stderr_ = sd / std::sqrt(static_cast<double>(per_seed.size()));
    }
    s.per_seed = std::move(per_seed);
    return s;
}

}  // namespace

SplitIndices stratified_split(const std::vector<int>& labels, double train_fraction,
                              std::uint64_t seed) {
    check_fraction(train_fraction);
    if (labels.empty()) throw UsageError("cannot split an empty label set");
    std::map<int, std::vector<std::uint32_t>> by_class;
    for (std::uint32_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    Rng rng(seed);
    SplitIndices split;
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        std::size_t take = static_cast<std::size_t>(train_fraction * members.size());
        take = std::max<std::size_t>(take, 1);
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < take ? split.train : split.test).push_back(members[i]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

SplitIndices random_split(std::size_t count, double train_fraction, std::uint64_t seed) {
    check_fraction(train_fraction);
    if (count == 0) throw UsageError("cannot split an empty dataset");
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(seed);
    rng.shuffle(order);
    std::size_t take = static_cast<std::size_t>(train_fraction * count);
    take = std::min(std::max<std::size_t>(take, 1), count - (count > 1 ? 1 : 0));
    SplitIndices split;
    split.train.assign(order.begin(), order.begin() + take);
    split.test.assign(order.begin() + take, order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace {

// Mean cross-entropy of the softmax model plus the l2 penalty. Probabilities
// land in `probs` (n x classes) for gradient reuse.
double softmax_objective(const Matrix& x, const std::vector<int>& y,
                         const std::vector<std::uint32_t>& rows, const std::vector<double>& w,
                         std::size_t classes, double lambda, std::vector<double>& probs) {
    std::size_t d = x.cols, stride = d + 1;
    double loss = 0.0;
    probs.assign(rows.size() * classes, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* row = x.data.data() + rows[i] * d;
        double best = -1e300;
        for (std::size_t c = 0; c < classes; ++c) {
            const double* wc = w.data() + c * stride;
            double z = wc[d];
            for (std::size_t j = 0; j < d; ++j) z += wc[j] * row[j];
            probs[i * classes + c] = z;
            best = std::max(best, z);
        }
        double denom = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            double e = std::exp(probs[i * classes + c] - best);
            probs[i * classes + c] = e;
            denom += e;
        }
        for (std::size_t c = 0; c < classes; ++c) probs[i * classes + c] /= denom;
        loss -= std::log(std::max(probs[i * classes + y[i]], 1e-300));
    }
    loss /= static_cast<double>(rows.size());
    double penalty = 0.0;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t j = 0; j < d; ++j) penalty += w[c * stride + j] * w[c * stride + j];
    return loss + 0.5 * lambda * penalty;
}

}  // namespace

LogReg train_logreg(const Matrix& x, const std::vector<int>& labels,
                    const std::vector<std::uint32_t>& train_rows, double lambda) {
    if (labels.size() != x.rows) throw UsageError("label count does not match matrix rows");
    if (train_rows.empty()) throw UsageError("empty training set");
    for (std::uint32_t r : train_rows)
        if (r >= x.rows) throw UsageError("training index out of range");

    LogReg model;
    for (std::uint32_t r : train_rows) model.label_values.push_back(labels[r]);
    std::sort(model.label_values.begin(), model.label_values.end());
    model.label_values.erase(std::unique(model.label_values.begin(), model.label_values.end()),
                             model.label_values.end());
    if (model.label_values.size() < 2)
        throw TaskError("training set contains a single class; nothing to separate");
    model.classes = model.label_values.size();
    model.dim = x.cols;

    std::vector<int> y(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        auto it = std::lower_bound(model.label_values.begin(), model.label_values.end(),
                                   labels[train_rows[i]]);
        y[i] = static_cast<int>(it - model.label_values.begin());
    }

    std::size_t d = x.cols, stride = d + 1, classes = model.classes;
    std::vector<double> w(classes * stride, 0.0), grad(w.size()), probs, trial(w.size());
    double n = static_cast<double>(train_rows.size());
    double obj = softmax_objective(x, y, train_rows, w, classes, lambda, probs);
    double step = 1.0;
    for (int iter = 0; iter < 500; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            const double* row = x.data.data() + train_rows[i] * d;
            for (std::size_t c = 0; c < classes; ++c) {
                double delta = probs[i * classes + c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
                double* gc = grad.data() + c * stride;
                for (std::size_t j = 0; j < d; ++j) gc[j] += delta * row[j];
                gc[d] += delta;
            }
        }
        double gnorm2 = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            double* gc = grad.data() + c * stride;
            for (std::size_t j = 0; j <= d; ++j) {
                gc[j] /= n;
                if (j < d) gc[j] += lambda * w[c * stride + j];
                gnorm2 += gc[j] * gc[j];
            }
        }
        if (std::sqrt(gnorm2) <= 1e-6) break;
        step *= 2.0;
        double next = obj;
        for (int half = 0; half < 60; ++half) {
            for (std::size_t j = 0; j < w.size(); ++j) trial[j] = w[j] - step * grad[j];
            next = softmax_objective(x, y, train_rows, trial, classes, lambda, probs);
            if (next <= obj - 0.5 * step * gnorm2) break;
            step *= 0.5;
        }
        if (next >= obj) break;
        w.swap(trial);
        obj = next;
        // probs now corresponds to w, as required by the next gradient pass
    }
    model.weights = std::move(w);
    return model;
}

int LogReg::predict_one(const double* row) const {
    std::size_t stride = dim + 1;
    std::size_t best = 0;
    double best_z = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
        const double* wc = weights.data() + c * stride;
        double z = wc[dim];
        for (std::size_t j = 0; j < dim; ++j) z += wc[j] * row[j];
        if (z > best_z) { best_z = z; best = c; }
    }
    return label_values[best];
}

std::vector<int> LogReg::predict(const Matrix& x) const {
    std::vector<int> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_one(x.data.data() + i * x.cols);
    return out;
}

std::vector<int> LogReg::predict(const Matrix& x, const std::vector<std::uint32_t>& rows) const {
    std::vector<int> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[i] = predict_one(x.data.data() + rows[i] * x.cols);
    return out;
}

double LogReg::binary_score(const double* row) const {
    if (classes != 2) throw UsageError("binary score requires a two-class model");
    std::size_t stride = dim + 1;
    const double* w0 = weights.data();
    const double* w1 = weights.data() + stride;
    double z = w1[dim] - w0[dim];
    for (std::size_t j = 0; j < dim; ++j) z += (w1[j] - w0[j]) * row[j];
    return z;
}

double micro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) throw UsageError("prediction and truth lengths differ");
    if (pred.empty()) throw UsageError("micro F1 of an empty prediction set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

ScoreSeries kshot_eval(const Matrix& x, const std::vector<int>& labels, std::uint32_t k,
                       const std::vector<std::uint64_t>& seeds, double lambda) {
    if (labels.size() != x.rows) throw UsageError("label count does not match matrix rows");
    if (k == 0) throw UsageError("k must be positive");
    if (seeds.empty()) throw UsageError("at least one seed is required");
    std::map<int, std::vector<std::uint32_t>> by_class;
    for (std::uint32_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (const auto& [label, members] : by_class)
        if (members.size() < k)
            throw TaskError("class " + std::to_string(label) + " has only " +
                            std::to_string(members.size()) + " members, fewer than k=" +
                            std::to_string(k));

    std::vector<double> scores(seeds.size());
    std::string failure;
    #pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        try {
            Rng rng(seeds[i]);
            std::vector<std::uint32_t> train, test;
            for (const auto& [label, members] : by_class) {
                std::vector<std::uint32_t> pool = members;
                rng.shuffle(pool);
                train.insert(train.end(), pool.begin(), pool.begin() + k);
                test.insert(test.end(), pool.begin() + k, pool.end());
            }
            LogReg model = train_logreg(x, labels, train, lambda);
            std::vector<int> truth;
            for (std::uint32_t t : test) truth.push_back(labels[t]);
            scores[i] = micro_f1(model.predict(x, test), truth);
        } catch (const std::runtime_error& e) {
            #pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw TaskError(failure);
    return summarize(std::move(scores));
}

ElasticNet train_elastic_net(const Matrix& x, const std::vector<double>& targets,
                             const std::vector<std::uint32_t>& train_rows, double lambda,
                             double gamma) {
    if (targets.size() != x.rows) throw UsageError("target count does not match matrix rows");
    if (train_rows.empty()) throw UsageError("empty training set");
    if (lambda < 0.0 || gamma < 0.0 || gamma > 1.0)
        throw UsageError("lambda must be nonnegative and gamma must lie in [0, 1]");

    std::size_t d = x.cols;
    double n = static_cast<double>(train_rows.size());
    ElasticNet model;
    model.weights.assign(d, 0.0);
    double ysum = 0.0;
    for (std::uint32_t r : train_rows) ysum += targets[r];
    model.bias = ysum / n;

    std::vector<double> resid(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i)
        resid[i] = targets[train_rows[i]] - model.bias;
    std::vector<double> col_sq(d, 0.0);
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        const double* row = x.data.data() + train_rows[i] * d;
        for (std::size_t j = 0; j < d; ++j) col_sq[j] += row[j] * row[j];
    }
    for (double& z : col_sq) z /= n;

    double l1 = lambda * gamma, l2 = lambda * (1.0 - gamma);
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (col_sq[j] + l2 <= 0.0) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < train_rows.size(); ++i)
                rho += x.data[train_rows[i] * d + j] * resid[i];
            rho = rho / n + col_sq[j] * model.weights[j];
            double wj = 0.0;
            if (rho > l1) wj = (rho - l1) / (col_sq[j] + l2);
            else if (rho < -l1) wj = (rho + l1) / (col_sq[j] + l2);
            double delta = wj - model.weights[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < train_rows.size(); ++i)
                    resid[i] -= delta * x.data[train_rows[i] * d + j];
                model.weights[j] = wj;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        double rbar = std::accumulate(resid.begin(), resid.end(), 0.0) / n;
        if (rbar != 0.0) {
            model.bias += rbar;
            for (double& r : resid) r -= rbar;
            max_delta = std::max(max_delta, std::abs(rbar));
        }
        if (max_delta < 1e-6) break;
    }
    return model;
}

double ElasticNet::predict_one(const double* row) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * row[j];
    return z;
}

std::vector<double> ElasticNet::predict(const Matrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_one(x.data.data() + i * x.cols);
    return out;
}

std::vector<double> ElasticNet::predict(const Matrix& x,
                                        const std::vector<std::uint32_t>& rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[i] = predict_one(x.data.data() + rows[i] * x.cols);
    return out;
}

double r2(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) throw UsageError("prediction and truth lengths differ");
    if (pred.empty()) throw UsageError("r2 of an empty prediction set");
    double mean = mean_of(truth);
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    }
    if (ss_tot == 0.0) throw TaskError("targets are constant; r2 is undefined");
    return 1.0 - ss_res / ss_tot;
}

namespace {

// Bridges of the graph spanned by `edges` over n nodes, as indices into
// `edges`. Iterative lowlink search, parallel edges handled by edge id.
std::vector<char> bridge_flags(std::uint32_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> adj(n);
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
        adj[edges[e].first].emplace_back(edges[e].second, e);
        adj[edges[e].second].emplace_back(edges[e].first, e);
    }
    std::vector<char> bridge(edges.size(), 0);
    std::vector<std::uint32_t> disc(n, 0), low(n, 0);
    std::uint32_t timer = 0;
    struct Frame { NodeId v; std::uint32_t parent_edge; std::size_t next; };
    std::vector<Frame> stack;
    for (NodeId root = 0; root < n; ++root) {
        if (disc[root] != 0) continue;
        disc[root] = low[root] = ++timer;
        stack.push_back({root, UINT32_MAX, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < adj[f.v].size()) {
                auto [u, eid] = adj[f.v][f.next++];
                if (eid == f.parent_edge) continue;
                if (disc[u] == 0) {
                    disc[u] = low[u] = ++timer;
                    stack.push_back({u, eid, 0});
                } else {
                    low[f.v] = std::min(low[f.v], disc[u]);
                }
            } else {
                NodeId v = f.v;
                std::uint32_t pe = f.parent_edge;
                stack.pop_back();
                if (!stack.empty()) {
                    NodeId p = stack.back().v;
                    low[p] = std::min(low[p], low[v]);
                    if (low[v] > disc[p]) bridge[pe] = 1;
                }
            }
        }
    }
    return bridge;
}

}  // namespace

LinkSplit link_split(const Graph& g, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0) throw UsageError("fraction must lie in [0, 1]");
    if (!is_connected(g)) throw UsageError("link split requires a connected graph");

    std::vector<Edge> kept;
    for (NodeId u = 0; u < g.node_count; ++u)
        for (NodeId v : g.neighbors_of(u))
            if (u < v) kept.emplace_back(u, v);
    std::size_t total = kept.size();
    std::size_t target = static_cast<std::size_t>(fraction * static_cast<double>(total));

    Rng rng(seed);
    LinkSplit split;
    for (std::size_t step = 0; step < target; ++step) {
        std::vector<char> bridge = bridge_flags(g.node_count, kept);
        std::vector<std::uint32_t> removable;
        for (std::uint32_t e = 0; e < kept.size(); ++e)
            if (!bridge[e]) removable.push_back(e);
        if (removable.empty())
            throw TaskError("no edge can be removed without disconnecting the graph; " +
                            std::to_string(split.positives.size()) + " of " +
                            std::to_string(target) + " removed");
        std::uint32_t pick = removable[rng.uniform(removable.size())];
        split.positives.push_back(kept[pick]);
        kept.erase(kept.begin() + pick);
    }

    // Negatives match positives 1:1 unless the graph is so dense that fewer
    // non-edges exist; then every non-edge is taken.
    std::size_t pairs = static_cast<std::size_t>(g.node_count) * (g.node_count - 1) / 2;
    std::size_t want = std::min(split.positives.size(), pairs - total);
    std::unordered_set<std::uint64_t> seen;
    while (split.negatives.size() < want) {
        NodeId u = static_cast<NodeId>(rng.uniform(g.node_count));
        NodeId v = static_cast<NodeId>(rng.uniform(g.node_count));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (g.has_edge(u, v)) continue;
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
        if (!seen.insert(key).second) continue;
        split.negatives.emplace_back(u, v);
    }

    LoadOptions opts;
    split.train_graph = build_graph(g.node_count, kept, g.ids, opts);
    return split;
}

const char* edge_op_name(EdgeOp op) {
    switch (op) {
        case EdgeOp::Average: return "average";
        case EdgeOp::Hadamard: return "hadamard";
        case EdgeOp::L1: return "l1";
        case EdgeOp::L2: return "l2";
    }
    return "?";
}

std::vector<double> edge_features(const std::vector<double>& u, const std::vector<double>& v,
                                  EdgeOp op) {
    if (u.size() != v.size()) throw UsageError("edge operator requires equal dimensions");
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        switch (op) {
            case EdgeOp::Average: out[j] = 0.5 * (u[j] + v[j]); break;
            case EdgeOp::Hadamard: out[j] = u[j] * v[j]; break;
            case EdgeOp::L1: out[j] = std::abs(u[j] - v[j]); break;
            case EdgeOp::L2: out[j] = (u[j] - v[j]) * (u[j] - v[j]); break;
        }
    }
    return out;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw UsageError("score and label lengths differ");
    if (scores.empty()) throw UsageError("auc of an empty score set");
    std::size_t pos = 0;
    for (int l : labels) pos += l != 0;
    std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw TaskError("auc needs both classes present");

    std::vector<std::uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) rank_sum_pos += avg_rank;
        i = j;
    }
    double u_stat = rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
    return u_stat / (static_cast<double>(pos) * static_cast<double>(neg));
}

LinkPredReport link_prediction_eval(const Graph& g, const FeatureStore& features,
                                    const TrainConfig& config, double fraction,
                                    double lambda, std::uint64_t seed) {
    LinkSplit split = link_split(g, fraction, mix_seed(seed, 1));

    TrainConfig cfg = config;
    cfg.seed = mix_seed(seed, 2);
    WalkSet walks = generate_walks(split.train_graph, WalkRegime::PerNode, cfg.walks_per_node,
                                   cfg.walk_length, mix_seed(seed, 3));
    ScaledCorpus corpus = corpus_for(walks, features, cfg);
    EmbeddingSet emb = train(corpus, cfg);

    // Training pairs for the edge classifier: surviving edges against fresh
    // non-edges disjoint from the evaluation negatives.
    std::vector<Edge> train_pos;
    for (NodeId u = 0; u < split.train_graph.node_count; ++u)
        for (NodeId v : split.train_graph.neighbors_of(u))
            if (u < v) train_pos.emplace_back(u, v);
    std::unordered_set<std::uint64_t> taken;
    for (const Edge& e : split.negatives)
        taken.insert((static_cast<std::uint64_t>(e.first) << 32) | e.second);
    Rng rng(mix_seed(seed, 4));
    std::vector<Edge> train_neg;
    std::size_t pairs = static_cast<std::size_t>(g.node_count) * (g.node_count - 1) / 2;
    std::size_t want = train_pos.size();
    if (pairs < g.edge_count() + split.negatives.size() + want)
        want = pairs - g.edge_count() - split.negatives.size();
    while (train_neg.size() < want) {
        NodeId u = static_cast<NodeId>(rng.uniform(g.node_count));
        NodeId v = static_cast<NodeId>(rng.uniform(g.node_count));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
        if (g.has_edge(u, v) || taken.count(key)) continue;
        taken.insert(key);
        train_neg.emplace_back(u, v);
    }

    auto emb_row = [&](NodeId v) {
        const double* p = emb.g_row(v);
        return std::vector<double>(p, p + emb.dim);
    };
    LinkPredReport report;
    report.best_auc = -1.0;
    for (EdgeOp op : {EdgeOp::Average, EdgeOp::Hadamard, EdgeOp::L1, EdgeOp::L2}) {
        Matrix train_x(train_pos.size() + train_neg.size(), emb.dim);
        std::vector<int> train_y(train_x.rows);
        for (std::size_t i = 0; i < train_pos.size() + train_neg.size(); ++i) {
            const Edge& e = i < train_pos.size() ? train_pos[i] : train_neg[i - train_pos.size()];
            std::vector<double> feat = edge_features(emb_row(e.first), emb_row(e.second), op);
            std::copy(feat.begin(), feat.end(), train_x.data.begin() + i * emb.dim);
            train_y[i] = i < train_pos.size() ? 1 : 0;
        }
        std::vector<std::uint32_t> all(train_x.rows);
        std::iota(all.begin(), all.end(), 0u);
        LogReg model = train_logreg(train_x, train_y, all, lambda);

        std::vector<double> scores;
        std::vector<int> labels;
        for (const Edge& e : split.positives) {
            scores.push_back(model.binary_score(
                edge_features(emb_row(e.first), emb_row(e.second), op).data()));
            labels.push_back(1);
        }
        for (const Edge& e : split.negatives) {
            scores.push_back(model.binary_score(
                edge_features(emb_row(e.first), emb_row(e.second), op).data()));
            labels.push_back(0);
        }
        double value = auc(scores, labels);
        report.auc_by_op[static_cast<int>(op)] = value;
        if (value > report.best_auc) {
            report.best_auc = value;
            report.best_op = op;
        }
    }
    return report;
}

ScoreSeries transfer_eval(const Graph& source, const FeatureStore& source_features,
                          const Graph& target, const FeatureStore& target_features,
                          FeatureId test_feature, const TransferConfig& config) {
    if (source_features.feature_count != target_features.feature_count)
        throw UsageError("source and target feature universes disagree");
    if (test_feature >= source_features.feature_count)
        throw UsageError("test feature outside the feature universe");
    if (source_features.node_count != source.node_count ||
        target_features.node_count != target.node_count)
        throw UsageError("feature store does not match its graph");
    if (config.seeds.empty()) throw UsageError("at least one seed is required");

    auto has_feature = [](const FeatureStore& fs, NodeId v, FeatureId f) {
        auto row = fs.features_of(v);
        return std::binary_search(row.begin(), row.end(), f);
    };
    std::vector<int> source_labels(source.node_count), target_labels(target.node_count);
    for (NodeId v = 0; v < source.node_count; ++v)
        source_labels[v] = has_feature(source_features, v, test_feature) ? 1 : 0;
    for (NodeId v = 0; v < target.node_count; ++v)
        target_labels[v] = has_feature(target_features, v, test_feature) ? 1 : 0;

    FeatureStore source_masked = remove_feature(source_features, test_feature);
    FeatureStore target_masked = remove_feature(target_features, test_feature);

    std::vector<double> scores(config.seeds.size());
    std::string failure;
    #pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        try {
            std::uint64_t s = config.seeds[i];
            TrainConfig cfg = config.embed;
            cfg.seed = mix_seed(s, 1);
            WalkSet src_walks = generate_walks(source, WalkRegime::PerNode, cfg.walks_per_node,
                                               cfg.walk_length, mix_seed(s, 2));
            EmbeddingSet src_emb = train(corpus_for(src_walks, source_masked, cfg), cfg);

            Matrix src_x(source.node_count, src_emb.dim);
            std::copy(src_emb.g.begin(), src_emb.g.end(), src_x.data.begin());
            std::vector<std::uint32_t> all(source.node_count);
            std::iota(all.begin(), all.end(), 0u);
            LogReg model = train_logreg(src_x, source_labels, all, config.lambda);

            cfg.seed = mix_seed(s, 3);
            WalkSet tgt_walks = generate_walks(target, WalkRegime::PerNode, cfg.walks_per_node,
                                               cfg.walk_length, mix_seed(s, 4));
            EmbeddingSet tgt_emb = train(corpus_for(tgt_walks, target_masked, cfg), cfg, &src_emb);

            Matrix tgt_x(target.node_count, tgt_emb.dim);
            std::copy(tgt_emb.g.begin(), tgt_emb.g.end(), tgt_x.data.begin());
            scores[i] = micro_f1(model.predict(tgt_x), target_labels);
        } catch (const std::runtime_error& e) {
            #pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw TaskError(failure);
    return summarize(std::move(scores));
}

std::vector<BenchRow> runtime_benchmark(const std::vector<std::uint32_t>& node_range,
                                        const std::vector<std::uint32_t>& feature_range,
                                        const std::vector<std::uint32_t>& thread_range,
                                        const TrainConfig& base, std::uint64_t seed) {
    std::vector<BenchRow> rows;
    for (std::uint32_t n : node_range) {
        for (std::uint32_t m : feature_range) {
            SyntheticGraph synth = generate_erdos_renyi(
                n, 8, 4 * m, m, mix_seed(seed, (static_cast<std::uint64_t>(n) << 8) | m));
            const FeatureStore& features = synth.features;

            TrainConfig cfg = base;
            cfg.epochs = 1;
            cfg.seed = mix_seed(seed, n ^ (static_cast<std::uint64_t>(m) << 16));
            WalkSet walks = generate_walks(synth.graph, WalkRegime::PerNode, cfg.walks_per_node,
                                           cfg.walk_length, mix_seed(seed, n + m));
            ScaledCorpus corpus = corpus_for(walks, features, cfg);
            for (std::uint32_t threads : thread_range) {
                cfg.threads = threads;
                train(corpus, cfg);  // warm pass
                auto t0 = std::chrono::steady_clock::now();
                train(corpus, cfg);
                auto t1 = std::chrono::steady_clock::now();
                double secs =
                    std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1e6;
                rows.push_back({n, m, threads, secs});
            }
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "nodes,features_per_node,threads,seconds\n";
    char buf[128];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%u,%u,%u,%.6f\n", r.nodes, r.features_per_node,
                      r.threads, r.seconds);
        out += buf;
    }
    return out;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
    std::string out = "task,dataset,seed,metric,value\n";
    char buf[256];
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%llu,%s,%.9g\n", r.task.c_str(), r.dataset.c_str(),
                      static_cast<unsigned long long>(r.seed), r.metric.c_str(), r.value);
        out += buf;
    }
    return out;
}

}  // namespace musae
