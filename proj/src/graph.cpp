#include "musae/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "musae/error.hpp"
#include "musae/rng.hpp"

namespace musae {

std::uint32_t IdMap::intern(const std::string& key) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    std::uint32_t idx = static_cast<std::uint32_t>(names_.size());
    index_.emplace(key, idx);
    names_.push_back(key);
    return idx;
}

std::int64_t IdMap::find(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors_of(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId v = 0; v < node_count; ++v)
        for (NodeId u : neighbors_of(v))
            if (v < u) out.emplace_back(v, u);
    return out;
}

Graph build_graph(std::uint32_t node_count, std::vector<Edge> raw_edges,
                  IdMap ids, const LoadOptions& opts) {
    Graph g;
    g.node_count = node_count;
    g.ids = std::move(ids);

    std::vector<Edge> edges;
    edges.reserve(raw_edges.size());
    for (auto [u, v] : raw_edges) {
        if (u == v) {
            ++g.self_loops_dropped;
            continue;
        }
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges.begin(), edges.end());
    auto last = std::unique(edges.begin(), edges.end());
    g.duplicate_edges_merged = static_cast<std::uint64_t>(edges.end() - last);
    edges.erase(last, edges.end());

    g.degrees.assign(node_count, 0);
    for (auto [u, v] : edges) {
        ++g.degrees[u];
        ++g.degrees[v];
    }

    if (!opts.allow_isolated) {
        for (NodeId v = 0; v < node_count; ++v) {
            if (g.degrees[v] == 0) {
                std::string name = g.ids.size() == node_count
                                       ? g.ids.name(v)
                                       : std::to_string(v);
                throw TaskError("isolated node '" + name +
                                "' (random walks cannot leave it); "
                                "pass allow-isolated to keep it");
            }
        }
    }

    g.offsets.assign(node_count + 1, 0);
    for (NodeId v = 0; v < node_count; ++v)
        g.offsets[v + 1] = g.offsets[v] + g.degrees[v];
    g.volume = g.offsets[node_count];

    g.neighbors.resize(g.volume);
    std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (auto [u, v] : edges) {
        g.neighbors[cursor[u]++] = v;
        g.neighbors[cursor[v]++] = u;
    }
    for (NodeId v = 0; v < node_count; ++v)
        std::sort(g.neighbors.begin() + g.offsets[v],
                  g.neighbors.begin() + g.offsets[v + 1]);
    return g;
}

namespace {

void trim(std::string& s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(s[i])) ++i;
    s.erase(0, i);
}

bool split_pair(const std::string& line, std::string& a, std::string& b) {
    std::size_t comma = line.find(',');
    if (comma != std::string::npos) {
        a = line.substr(0, comma);
        b = line.substr(comma + 1);
        trim(a);
        trim(b);
        return !a.empty() && !b.empty() && b.find(',') == std::string::npos;
    }
    std::istringstream ss(line);
    std::string extra;
    if (!(ss >> a >> b)) return false;
    if (ss >> extra) return false;
    return true;
}

}  // namespace

Graph load_edge_list(std::istream& in, const LoadOptions& opts) {
    IdMap ids;
    std::vector<Edge> edges;
    std::string line, a, b;
    std::uint64_t line_no = 0;
    bool saw_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!saw_data) {
            saw_data = true;
            std::string h = line;
            h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\t'; }), h.end());
            if (h == "id_1,id_2") continue;  // dataset header
        }
        if (!split_pair(line, a, b))
            throw TaskError("edge list parse error at line " + std::to_string(line_no) + ": '" + line + "'");
        NodeId u = ids.intern(a);  // interning order defines the dense index order
        NodeId v = ids.intern(b);
        edges.emplace_back(u, v);
    }
    if (ids.size() == 0) throw TaskError("edge list is empty");
    std::uint32_t n = ids.size();
    return build_graph(n, std::move(edges), std::move(ids), opts);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    out << "id_1,id_2\n";
    for (auto [u, v] : g.edges())
        out << g.ids.name(u) << ',' << g.ids.name(v) << '\n';
}

bool FeatureStore::has_feature(NodeId v, FeatureId f) const {
    auto fs = features_of(v);
    return std::binary_search(fs.begin(), fs.end(), f);
}

FeatureStore feature_store_from_lists(std::vector<std::vector<FeatureId>> lists,
                                      std::uint32_t feature_count_hint) {
    FeatureStore fs;
    fs.node_count = static_cast<std::uint32_t>(lists.size());
    fs.feature_count = feature_count_hint;
    fs.offsets.assign(fs.node_count + 1, 0);
    for (std::uint32_t v = 0; v < fs.node_count; ++v) {
        auto& l = lists[v];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        if (!l.empty())
            fs.feature_count = std::max(fs.feature_count, l.back() + 1);
        fs.offsets[v + 1] = fs.offsets[v] + l.size();
    }
    fs.items.reserve(fs.offsets[fs.node_count]);
    for (auto& l : lists) fs.items.insert(fs.items.end(), l.begin(), l.end());
    fs.total_incidence = fs.items.size();
    return fs;
}

FeatureStore load_features(std::istream& in, const Graph& g) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw TaskError(std::string("feature file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw TaskError("feature file must be a JSON object");

    std::vector<std::vector<FeatureId>> lists(g.node_count);
    std::vector<bool> seen(g.node_count, false);
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::int64_t v = g.ids.find(it.key());
        if (v < 0)
            throw TaskError("feature file names node '" + it.key() + "' which is not in the graph");
        if (!it.value().is_array())
            throw TaskError("features of node '" + it.key() + "' are not an array");
        seen[v] = true;
        for (const auto& e : it.value()) {
            if (!e.is_number_integer() || e.get<std::int64_t>() < 0)
                throw TaskError("node '" + it.key() + "' has a non-integer or negative feature id");
            lists[v].push_back(static_cast<FeatureId>(e.get<std::int64_t>()));
        }
    }

    FeatureStore fs = feature_store_from_lists(std::move(lists));
    for (NodeId v = 0; v < g.node_count; ++v)
        if (!seen[v]) ++fs.nodes_missing_in_input;
    return fs;
}

FeatureStore ego_augment(const FeatureStore& f, const Graph& g) {
    FeatureStore out;
    out.node_count = g.node_count;
    out.feature_count = f.feature_count + g.node_count;
    out.offsets.assign(g.node_count + 1, 0);
    out.items.reserve(f.total_incidence + g.node_count);
    for (NodeId v = 0; v < g.node_count; ++v) {
        auto fv = f.features_of(v);
        out.items.insert(out.items.end(), fv.begin(), fv.end());
        out.items.push_back(f.feature_count + v);  // ids stay sorted: q + v > any original id
        out.offsets[v + 1] = out.items.size();
    }
    out.total_incidence = out.items.size();
    return out;
}

FeatureStore remove_feature(const FeatureStore& f, FeatureId feature) {
    FeatureStore out;
    out.node_count = f.node_count;
    out.feature_count = f.feature_count;
    out.offsets.assign(f.node_count + 1, 0);
    out.items.reserve(f.items.size());
    for (NodeId v = 0; v < f.node_count; ++v) {
        for (FeatureId x : f.features_of(v))
            if (x != feature) out.items.push_back(x);
        out.offsets[v + 1] = out.items.size();
    }
    out.total_incidence = out.items.size();
    return out;
}

bool is_connected(const Graph& g) {
    if (g.node_count == 0) return true;
    std::vector<bool> seen(g.node_count, false);
    std::deque<NodeId> queue{0};
    seen[0] = true;
    std::uint32_t found = 1;
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (NodeId u : g.neighbors_of(v)) {
            if (!seen[u]) {
                seen[u] = true;
                ++found;
                queue.push_back(u);
            }
        }
    }
    return found == g.node_count;
}

bool is_bipartite(const Graph& g) {
    std::vector<int> color(g.node_count, -1);
    std::deque<NodeId> queue;
    for (NodeId start = 0; start < g.node_count; ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        queue.push_back(start);
        while (!queue.empty()) {
            NodeId v = queue.front();
            queue.pop_front();
            for (NodeId u : g.neighbors_of(v)) {
                if (color[u] == -1) {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if (color[u] == color[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
#pragma omp parallel for schedule(static) if (a.rows > 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.rows); ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            double* crow = c.data.data() + i * c.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

DenseView dense_view(const Graph& g, const FeatureStore& f, std::uint32_t size_cap) {
    if (g.node_count > size_cap)
        throw CapError("graph has " + std::to_string(g.node_count) +
                       " nodes, above the dense oracle cap of " + std::to_string(size_cap) +
                       "; use the sampling-based empirical estimator instead");
    DenseView view;
    view.node_count = g.node_count;
    view.feature_count = f.feature_count;
    view.volume = g.volume;
    view.p = Matrix(g.node_count, g.node_count);
    view.d_diag.resize(g.node_count);
    for (NodeId v = 0; v < g.node_count; ++v) {
        view.d_diag[v] = static_cast<double>(g.degree(v));
        double w = 1.0 / static_cast<double>(g.degree(v));
        for (NodeId u : g.neighbors_of(v)) view.p.at(v, u) = w;
    }
    view.e_diag.assign(f.feature_count, 0.0);
    for (NodeId v = 0; v < g.node_count; ++v)
        for (FeatureId x : f.features_of(v))
            view.e_diag[x] += static_cast<double>(g.degree(v));
    return view;
}

namespace {

// fpn distinct draws from [0, pool)
void sample_distinct(Rng& rng, std::uint32_t pool, std::uint32_t fpn,
                     std::vector<FeatureId>& out) {
    out.clear();
    for (std::uint32_t k = pool - fpn; k < pool; ++k) {
        auto r = static_cast<FeatureId>(rng.uniform(k + 1));
        if (std::find(out.begin(), out.end(), r) != out.end())
            out.push_back(static_cast<FeatureId>(k));
        else
            out.push_back(r);
    }
}

void repair_isolated(std::uint32_t n, std::vector<Edge>& edges, Rng& rng) {
    std::vector<std::uint32_t> deg(n, 0);
    for (auto [u, v] : edges)
        if (u != v) {
            ++deg[u];
            ++deg[v];
        }
    for (NodeId v = 0; v < n; ++v) {
        if (deg[v] == 0) {
            auto u = static_cast<NodeId>(rng.uniform(n - 1));
            if (u >= v) ++u;
            edges.emplace_back(v, u);
            ++deg[v];
            ++deg[u];
        }
    }
}

}  // namespace

SyntheticGraph generate_erdos_renyi(std::uint32_t n, std::uint32_t edges_per_node,
                                    std::uint32_t feature_pool,
                                    std::uint32_t features_per_node,
                                    std::uint64_t seed) {
    if (n < 2) throw UsageError("generator needs n >= 2");
    if (features_per_node > feature_pool)
        throw UsageError("features_per_node exceeds feature_pool");

    Rng rng(mix_seed(seed, 0xE5));
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * edges_per_node);
    for (NodeId v = 0; v < n; ++v) {
        for (std::uint32_t k = 0; k < edges_per_node; ++k) {
            auto u = static_cast<NodeId>(rng.uniform(n - 1));
            if (u >= v) ++u;
            edges.emplace_back(v, u);
        }
    }
    repair_isolated(n, edges, rng);

    SyntheticGraph out;
    IdMap ids;
    for (NodeId v = 0; v < n; ++v) ids.intern(std::to_string(v));
    out.graph = build_graph(n, std::move(edges), std::move(ids));

    Rng frng(mix_seed(seed, 0xF0));
    std::vector<std::vector<FeatureId>> lists(n);
    std::vector<FeatureId> buf;
    for (NodeId v = 0; v < n; ++v) {
        sample_distinct(frng, feature_pool, features_per_node, buf);
        lists[v] = buf;
    }
    out.features = feature_store_from_lists(std::move(lists), feature_pool);
    return out;
}

SyntheticGraph generate_sbm(const SbmConfig& cfg, std::uint64_t seed) {
    const std::uint32_t n = cfg.nodes_per_community * cfg.communities;
    if (n < 2) throw UsageError("generator needs n >= 2");

    Rng rng(mix_seed(seed, 0x5B));
    std::vector<Edge> edges;
    std::vector<std::uint32_t> community(n);
    for (NodeId v = 0; v < n; ++v) community[v] = v / cfg.nodes_per_community;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            double p = community[u] == community[v] ? cfg.p_in : cfg.p_out;
            if (rng.real() < p) edges.emplace_back(u, v);
        }
    }
    repair_isolated(n, edges, rng);

    SyntheticGraph out;
    IdMap ids;
    for (NodeId v = 0; v < n; ++v) ids.intern(std::to_string(v));
    out.graph = build_graph(n, std::move(edges), std::move(ids));
    out.communities = std::move(community);

    // community-biased feature draws from a shared partitioned pool
    Rng frng(mix_seed(seed, 0x5C));
    const std::uint32_t q = cfg.communities * cfg.pool_per_community;
    std::vector<std::vector<FeatureId>> lists(n);
    for (NodeId v = 0; v < n; ++v) {
        std::uint32_t own = out.communities[v];
        auto& l = lists[v];
        while (l.size() < cfg.features_per_node) {
            std::uint32_t slice = own;
            if (frng.real() >= cfg.community_bias && cfg.communities > 1) {
                slice = static_cast<std::uint32_t>(frng.uniform(cfg.communities - 1));
                if (slice >= own) ++slice;
            }
            auto f = static_cast<FeatureId>(slice * cfg.pool_per_community +
                                            frng.uniform(cfg.pool_per_community));
            if (std::find(l.begin(), l.end(), f) == l.end()) l.push_back(f);
        }
    }
    out.features = feature_store_from_lists(std::move(lists), q);
    return out;
}

}  // namespace musae
