#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "musae/corpus.hpp"
#include "musae/error.hpp"
#include "musae/eval.hpp"
#include "musae/graph.hpp"
#include "musae/pmi.hpp"
#include "musae/rng.hpp"
#include "musae/trainer.hpp"
#include "musae/walker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace musae;

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::uint64_t hash = 1469598103934665603ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct ManifestWriter {
    std::string command;
    fs::path out_dir;
    json flags = json::object();
    json inputs = json::object();
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void add_input(const fs::path& path) { inputs[path.string()] = hex64(fnv1a64_file(path)); }

    fs::path emit() {
        double wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count() /
                      1000.0;
        json m = {{"command", command}, {"version", kVersion},   {"seed", seed},
                  {"flags", flags},     {"inputs", inputs},      {"outputs", outputs},
                  {"wall_clock_seconds", wall}};
        fs::path path = out_dir / "manifest.json";
        std::ofstream out(path);
        out << m.dump(2) << "\n";
        return path;
    }
};

Graph load_graph(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    return load_edge_list(in);
}

FeatureStore load_feature_file(const fs::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    return load_features(in, g);
}

void ensure_out_dir(const fs::path& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

std::vector<std::string> feature_row_ids(std::uint32_t feature_count) {
    std::vector<std::string> ids(feature_count);
    for (std::uint32_t f = 0; f < feature_count; ++f) ids[f] = std::to_string(f);
    return ids;
}

// Shared embedding knobs, mirrored across subcommands.
struct EmbedFlags {
    std::string mode = "musae";
    bool ego = false;
    TrainConfig config;
    CLI::Option* dim_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "ae or musae")->check(CLI::IsMember({"ae", "musae"}));
        cmd->add_flag("--ego", ego, "append per-node identity features");
        dim_opt = cmd->add_option("--dim", config.dim, "embedding width d");
        cmd->add_option("--walk-length", config.walk_length, "steps per walk l");
        cmd->add_option("--walks-per-node", config.walks_per_node, "walks started per node p");
        cmd->add_option("--epochs", config.epochs, "training epochs e");
        cmd->add_option("--window", config.window, "window size t");
        cmd->add_option("--negatives", config.negatives, "negative samples b");
        cmd->add_option("--lr-max", config.lr_max, "initial learning rate");
        cmd->add_option("--lr-min", config.lr_min, "final learning rate");
        cmd->add_option("--neg-exponent", config.neg_exponent, "noise distribution exponent");
    }

    // Unless --dim was given, trim the default width to a multiple of the
    // window so a bare musae run does not trip the divisibility check.
    std::uint32_t effective_dim() const {
        if (mode == "musae" && dim_opt != nullptr && dim_opt->count() == 0 && config.window > 0)
            return config.dim - config.dim % config.window;
        return config.dim;
    }

    TrainConfig resolve(std::uint64_t seed, int threads) const {
        TrainConfig cfg = config;
        cfg.mode = mode == "musae" ? EmbedMode::MUSAE : EmbedMode::AE;
        cfg.dim = effective_dim();
        cfg.ego = ego;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.validate();
        return cfg;
    }

    json to_json(std::uint64_t seed, int threads) const {
        return json{{"mode", mode},
                    {"ego", ego},
                    {"dim", effective_dim()},
                    {"walk_length", config.walk_length},
                    {"walks_per_node", config.walks_per_node},
                    {"epochs", config.epochs},
                    {"window", config.window},
                    {"negatives", config.negatives},
                    {"lr_max", config.lr_max},
                    {"lr_min", config.lr_min},
                    {"neg_exponent", config.neg_exponent},
                    {"seed", seed},
                    {"threads", threads}};
    }
};

EmbeddingSet embed_pipeline(const Graph& g, const FeatureStore& features,
                            const TrainConfig& cfg) {
    WalkSet walks = generate_walks(g, WalkRegime::PerNode, cfg.walks_per_node, cfg.walk_length,
                                   mix_seed(cfg.seed, 0xA11), cfg.threads);
    ScaledCorpus corpus = cfg.mode == EmbedMode::MUSAE
                              ? build_multiscale(walks, features, cfg.window, cfg.threads)
                              : build_pooled(walks, features, cfg.window, cfg.threads);
    return train(corpus, cfg);
}

// ---- embed ----------------------------------------------------------------

struct EmbedArgs {
    std::string edges, features, out = ".";
    EmbedFlags flags;
    std::uint64_t seed = 1;
    int threads = 1;
};

void run_embed(const EmbedArgs& a) {
    ManifestWriter manifest;
    manifest.command = "embed";
    manifest.out_dir = a.out;
    manifest.seed = a.seed;
    manifest.add_input(a.edges);
    manifest.add_input(a.features);
    manifest.flags = a.flags.to_json(a.seed, a.threads);
    manifest.flags["edges"] = a.edges;
    manifest.flags["features"] = a.features;

    TrainConfig cfg = a.flags.resolve(a.seed, a.threads);
    Graph g = load_graph(a.edges);
    FeatureStore features = load_feature_file(a.features, g);
    if (cfg.ego) features = ego_augment(features, g);

    EmbeddingSet emb = embed_pipeline(g, features, cfg);

    ensure_out_dir(a.out);
    fs::path node_path = fs::path(a.out) / "node_embeddings.csv";
    fs::path feat_path = fs::path(a.out) / "feature_embeddings.csv";
    {
        std::ofstream out(node_path);
        write_embedding_csv(emb.g, emb.dim, g.ids.names(), out);
    }
    {
        std::ofstream out(feat_path);
        write_embedding_csv(emb.h, emb.dim, feature_row_ids(emb.feature_count), out);
    }
    fs::path sidecar = fs::path(a.out) / "embedding_meta.json";
    {
        std::ofstream out(sidecar);
        write_sidecar(cfg, emb, g.ids, out);
    }
    manifest.outputs = {node_path.string(), feat_path.string(), sidecar.string()};
    manifest.emit();
    std::cout << "wrote " << node_path.string() << " (" << emb.node_count << " x " << emb.dim
              << ") and " << feat_path.string() << " (" << emb.feature_count << " x " << emb.dim
              << ")\n";
}

// ---- oracle ---------------------------------------------------------------

struct OracleArgs {
    std::string edges, features, out = ".", embeddings;
    bool pooled = false;
    bool ego = false;
    std::int32_t scale = -1;
    std::uint32_t window = 3;
    double negatives = 5.0;
    std::uint32_t cap = kDefaultOracleCap;
    std::uint64_t seed = 1;
    int threads = 1;
};

void run_oracle(const OracleArgs& a) {
    if (a.pooled == (a.scale >= 0))
        throw UsageError("pass exactly one of --scale R or --pooled");
    ManifestWriter manifest;
    manifest.command = "oracle";
    manifest.out_dir = a.out;
    manifest.seed = a.seed;
    manifest.add_input(a.edges);
    manifest.add_input(a.features);
    manifest.flags = {{"edges", a.edges},     {"features", a.features}, {"pooled", a.pooled},
                      {"scale", a.scale},     {"window", a.window},     {"negatives", a.negatives},
                      {"ego", a.ego},         {"cap", a.cap}};

    Graph g = load_graph(a.edges);
    FeatureStore features = load_feature_file(a.features, g);

    PmiTarget target;
    std::string stem;
    if (a.pooled) {
        target = a.ego ? ego_ae_target(g, features, a.window, a.negatives, a.cap)
                       : ae_target(dense_view(g, features, a.cap), features, a.window,
                                   a.negatives);
        stem = "target_pooled";
    } else {
        std::uint32_t r = static_cast<std::uint32_t>(a.scale);
        if (r == 0) throw UsageError("--scale is 1-based");
        target = a.ego ? ego_musae_target(g, features, r, a.negatives, a.cap)
                       : musae_target(dense_view(g, features, a.cap), features, r, a.negatives);
        stem = "target_scale_" + std::to_string(r);
    }

    ensure_out_dir(a.out);
    fs::path target_path = fs::path(a.out) / (stem + ".csv");
    {
        std::ofstream out(target_path);
        write_target_csv(target, g.ids, out);
    }
    manifest.outputs = {target_path.string()};

    if (!a.embeddings.empty()) {
        fs::path run_dir(a.embeddings);
        std::ifstream meta_in(run_dir / "embedding_meta.json");
        if (!meta_in) throw UsageError("no embedding_meta.json under " + run_dir.string());
        json meta = json::parse(meta_in);
        std::string mode = meta["config"]["mode"];
        if (a.pooled && mode != "ae")
            throw UsageError("pooled target needs ae embeddings, got " + mode);
        if (!a.pooled && mode != "musae")
            throw UsageError("per-scale target needs musae embeddings, got " + mode);

        std::size_t dim = 0;
        std::vector<std::string> ids;
        std::ifstream node_in(run_dir / "node_embeddings.csv");
        if (!node_in) throw UsageError("no node_embeddings.csv under " + run_dir.string());
        std::vector<double> gmat = read_embedding_csv(node_in, dim, ids);
        std::size_t fdim = 0;
        std::vector<std::string> fids;
        std::ifstream feat_in(run_dir / "feature_embeddings.csv");
        if (!feat_in) throw UsageError("no feature_embeddings.csv under " + run_dir.string());
        std::vector<double> hmat = read_embedding_csv(feat_in, fdim, fids);
        if (dim != fdim) throw UsageError("node and feature embedding widths differ");
        if (ids.size() != g.node_count)
            throw UsageError("embedding row count does not match the graph");
        if (fids.size() != target.cols)
            throw UsageError("feature embedding rows do not match the target columns");

        std::size_t col_begin = 0, col_end = dim;
        if (!a.pooled) {
            auto blocks = meta["scale_blocks"];
            std::size_t idx = static_cast<std::size_t>(a.scale - 1);
            if (idx >= blocks.size())
                throw UsageError("scale exceeds the trained window");
            col_begin = blocks[idx]["begin"];
            col_end = blocks[idx]["end"];
        }
        FitReport fit = factorization_fit(gmat, hmat, dim, col_begin, col_end, target);
        fs::path fit_path = fs::path(a.out) / "fit_report.csv";
        std::ofstream out(fit_path);
        out << "target,pearson,rmse,entries\n"
            << stem << "," << fit.pearson << "," << fit.masked_rmse << "," << fit.entries
            << "\n";
        manifest.outputs.push_back(fit_path.string());
        std::cout << stem << ": pearson " << fit.pearson << ", rmse " << fit.masked_rmse
                  << " over " << fit.entries << " entries\n";
    }
    manifest.emit();
    std::cout << "wrote " << target_path.string() << "\n";
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
    std::string embeddings, labels, out = ".", task = "classify", dataset;
    std::uint32_t repeats = 10;
    std::uint32_t k = 5;
    double train_fraction = 0.8;
    double lambda = 0.01;
    double gamma = 0.5;
    std::uint64_t seed = 1;
    int threads = 1;
};

void load_run_embeddings(const std::string& run_dir, Matrix& x,
                         std::vector<std::string>& ids) {
    std::ifstream in(fs::path(run_dir) / "node_embeddings.csv");
    if (!in) throw UsageError("no node_embeddings.csv under " + run_dir);
    std::size_t dim = 0;
    std::vector<double> data = read_embedding_csv(in, dim, ids);
    x.rows = ids.size();
    x.cols = dim;
    x.data = std::move(data);
}

void run_eval(const EvalArgs& a) {
    ManifestWriter manifest;
    manifest.command = "eval";
    manifest.out_dir = a.out;
    manifest.seed = a.seed;
    manifest.add_input(fs::path(a.embeddings) / "node_embeddings.csv");
    manifest.add_input(a.labels);
    manifest.flags = {{"task", a.task},     {"repeats", a.repeats},
                      {"k", a.k},           {"train_fraction", a.train_fraction},
                      {"lambda", a.lambda}, {"gamma", a.gamma},
                      {"labels", a.labels}, {"embeddings", a.embeddings}};
    if (a.repeats == 0) throw UsageError("--repeats must be positive");

    Matrix x;
    std::vector<std::string> ids;
    load_run_embeddings(a.embeddings, x, ids);
    std::map<std::string, std::uint32_t> row_of;
    for (std::uint32_t i = 0; i < ids.size(); ++i) row_of[ids[i]] = i;

    std::ifstream label_in(a.labels);
    if (!label_in) throw UsageError("cannot open " + a.labels);
    std::string line;
    if (!std::getline(label_in, line) || line.rfind("id,", 0) != 0)
        throw TaskError("label file must start with an `id,target` header");
    std::vector<int> labels(ids.size(), 0);
    std::vector<double> targets(ids.size(), 0.0);
    std::vector<char> seen(ids.size(), 0);
    std::size_t line_no = 1;
    while (std::getline(label_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw TaskError("label line " + std::to_string(line_no) + " lacks a comma");
        std::string id = line.substr(0, comma);
        auto it = row_of.find(id);
        if (it == row_of.end())
            throw TaskError("label id `" + id + "` has no embedding row");
        try {
            targets[it->second] = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw TaskError("label line " + std::to_string(line_no) + " has a bad target");
        }
        labels[it->second] = static_cast<int>(targets[it->second]);
        seen[it->second] = 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw TaskError("no label for node `" + ids[i] + "`");

    std::string dataset = a.dataset.empty() ? fs::path(a.labels).stem().string() : a.dataset;
    std::vector<ResultRow> rows;
    std::vector<double> scores;

    if (a.task == "classify") {
        for (std::uint32_t i = 0; i < a.repeats; ++i) {
            std::uint64_t s = mix_seed(a.seed, i);
            SplitIndices split = stratified_split(labels, a.train_fraction, s);
            LogReg model = train_logreg(x, labels, split.train, a.lambda);
            std::vector<int> truth;
            for (std::uint32_t t : split.test) truth.push_back(labels[t]);
            double f1 = micro_f1(model.predict(x, split.test), truth);
            scores.push_back(f1);
            rows.push_back({"classify", dataset, s, "micro_f1", f1});
        }
    } else if (a.task == "kshot") {
        std::vector<std::uint64_t> seeds(a.repeats);
        for (std::uint32_t i = 0; i < a.repeats; ++i) seeds[i] = mix_seed(a.seed, i);
        ScoreSeries series = kshot_eval(x, labels, a.k, seeds, a.lambda);
        scores = series.per_seed;
        for (std::uint32_t i = 0; i < a.repeats; ++i)
            rows.push_back({"kshot", dataset, seeds[i], "micro_f1", series.per_seed[i]});
    } else if (a.task == "regress") {
        for (std::uint32_t i = 0; i < a.repeats; ++i) {
            std::uint64_t s = mix_seed(a.seed, i);
            SplitIndices split = random_split(x.rows, a.train_fraction, s);
            ElasticNet model = train_elastic_net(x, targets, split.train, a.lambda, a.gamma);
            std::vector<double> truth;
            for (std::uint32_t t : split.test) truth.push_back(targets[t]);
            double score = r2(model.predict(x, split.test), truth);
            scores.push_back(score);
            rows.push_back({"regress", dataset, s, "r2", score});
        }
    } else {
        throw UsageError("unknown task `" + a.task + "`");
    }

    double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
    double se = 0.0;
    if (scores.size() > 1) {
        double ss = 0.0;
        for (double v : scores) ss += (v - mean) * (v - mean);
        se = std::sqrt(ss / (scores.size() - 1)) / std::sqrt(static_cast<double>(scores.size()));
    }
    std::string metric = a.task == "regress" ? "r2" : "micro_f1";
    rows.push_back({a.task, dataset, a.seed, metric + "_mean", mean});

    ensure_out_dir(a.out);
    fs::path results_path = fs::path(a.out) / "results.csv";
    std::ofstream out(results_path);
    out << results_csv(rows);
    manifest.outputs = {results_path.string()};
    manifest.emit();
    std::cout << a.task << " " << metric << ": " << mean << " +/- " << se << " over "
              << a.repeats << " repeats\n";
}

// ---- linkpred ---------------------------------------------------------------

struct LinkPredArgs {
    std::string edges, features, out = ".";
    EmbedFlags flags;
    double fraction = 0.5;
    double lambda = 0.01;
    std::uint64_t seed = 1;
    int threads = 1;
};

void run_linkpred(const LinkPredArgs& a) {
    ManifestWriter manifest;
    manifest.command = "linkpred";
    manifest.out_dir = a.out;
    manifest.seed = a.seed;
    manifest.add_input(a.edges);
    manifest.add_input(a.features);
    manifest.flags = a.flags.to_json(a.seed, a.threads);
    manifest.flags["edges"] = a.edges;
    manifest.flags["features"] = a.features;
    manifest.flags["fraction"] = a.fraction;
    manifest.flags["lambda"] = a.lambda;

    TrainConfig cfg = a.flags.resolve(a.seed, a.threads);
    Graph g = load_graph(a.edges);
    FeatureStore features = load_feature_file(a.features, g);
    if (cfg.ego) features = ego_augment(features, g);

    LinkPredReport report = link_prediction_eval(g, features, cfg, a.fraction, a.lambda, a.seed);

    std::string dataset = fs::path(a.edges).stem().string();
    std::vector<ResultRow> rows;
    for (EdgeOp op : {EdgeOp::Average, EdgeOp::Hadamard, EdgeOp::L1, EdgeOp::L2})
        rows.push_back({"linkpred", dataset, a.seed,
                        std::string("auc_") + edge_op_name(op),
                        report.auc_by_op[static_cast<int>(op)]});
    rows.push_back({"linkpred", dataset, a.seed,
                    std::string("auc_best_") + edge_op_name(report.best_op), report.best_auc});

    ensure_out_dir(a.out);
    fs::path results_path = fs::path(a.out) / "results.csv";
    std::ofstream out(results_path);
    out << results_csv(rows);
    manifest.outputs = {results_path.string()};
    manifest.emit();
    std::cout << "best operator: " << edge_op_name(report.best_op) << " (auc "
              << report.best_auc << ")\n";
}

// ---- transfer ---------------------------------------------------------------

struct TransferArgs {
    std::string source_edges, source_features, target_edges, target_features, out = ".";
    EmbedFlags flags;
    std::uint32_t test_feature = 0;
    std::uint32_t repeats = 10;
    double lambda = 0.01;
    std::uint64_t seed = 1;
    int threads = 1;
};

void run_transfer(const TransferArgs& a) {
    ManifestWriter manifest;
    manifest.command = "transfer";
    manifest.out_dir = a.out;
    manifest.seed = a.seed;
    manifest.add_input(a.source_edges);
    manifest.add_input(a.source_features);
    manifest.add_input(a.target_edges);
    manifest.add_input(a.target_features);
    manifest.flags = a.flags.to_json(a.seed, a.threads);
    manifest.flags["test_feature"] = a.test_feature;
    manifest.flags["repeats"] = a.repeats;
    manifest.flags["lambda"] = a.lambda;
    if (a.repeats == 0) throw UsageError("--repeats must be positive");

    Graph src = load_graph(a.source_edges);
    FeatureStore src_features = load_feature_file(a.source_features, src);
    Graph tgt = load_graph(a.target_edges);
    FeatureStore tgt_features = load_feature_file(a.target_features, tgt);

    TransferConfig tc;
    tc.embed = a.flags.resolve(a.seed, a.threads);
    tc.lambda = a.lambda;
    for (std::uint32_t i = 0; i < a.repeats; ++i) tc.seeds.push_back(mix_seed(a.seed, i));

    ScoreSeries series =
        transfer_eval(src, src_features, tgt, tgt_features, a.test_feature, tc);

    std::string dataset = fs::path(a.target_edges).stem().string();
    std::vector<ResultRow> rows;
    for (std::uint32_t i = 0; i < a.repeats; ++i)
        rows.push_back({"transfer", dataset, tc.seeds[i], "micro_f1", series.per_seed[i]});
    rows.push_back({"transfer", dataset, a.seed, "micro_f1_mean", series.mean});

    ensure_out_dir(a.out);
    fs::path results_path = fs::path(a.out) / "results.csv";
    std::ofstream out(results_path);
    out << results_csv(rows);
    manifest.outputs = {results_path.string()};
    manifest.emit();
    std::cout << "transfer micro_f1: " << series.mean << " +/- " << series.stderr_ << " over "
              << a.repeats << " seeds\n";
}

// ---- bench ------------------------------------------------------------------

std::vector<std::uint32_t> parse_range(const std::string& text) {
    std::vector<std::uint32_t> out;
    auto parse_one = [](const std::string& s) -> std::uint32_t {
        std::size_t caret = s.find('^');
        if (caret != std::string::npos) {
            unsigned long base = std::stoul(s.substr(0, caret));
            unsigned long exp = std::stoul(s.substr(caret + 1));
            std::uint32_t v = 1;
            for (unsigned long i = 0; i < exp; ++i) v *= static_cast<std::uint32_t>(base);
            return v;
        }
        return static_cast<std::uint32_t>(std::stoul(s));
    };
    try {
        std::size_t dots = text.find("..");
        if (dots != std::string::npos) {
            std::string lo_s = text.substr(0, dots), hi_s = text.substr(dots + 2);
            std::size_t lo_caret = lo_s.find('^');
            if (lo_caret != std::string::npos && hi_s.find('^') != std::string::npos) {
                // 2^7..2^14 walks the exponents
                unsigned long base = std::stoul(lo_s.substr(0, lo_caret));
                unsigned long lo_e = std::stoul(lo_s.substr(lo_caret + 1));
                unsigned long hi_e = std::stoul(hi_s.substr(hi_s.find('^') + 1));
                if (lo_e > hi_e || hi_e - lo_e > 40)
                    throw UsageError("bad exponent range `" + text + "`");
                for (unsigned long e = lo_e; e <= hi_e; ++e) {
                    std::uint32_t v = 1;
                    for (unsigned long i = 0; i < e; ++i) v *= static_cast<std::uint32_t>(base);
                    out.push_back(v);
                }
                return out;
            }
            std::uint32_t lo = parse_one(lo_s), hi = parse_one(hi_s);
            if (lo > hi || hi - lo > 4096) throw UsageError("bad range `" + text + "`");
            for (std::uint32_t v = lo; v <= hi; ++v) out.push_back(v);
            return out;
        }
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_one(item));
    } catch (const std::invalid_argument&) {
        throw UsageError("cannot parse range `" + text + "`");
    } catch (const std::out_of_range&) {
        throw UsageError("range value out of bounds in `" + text + "`");
    }
    if (out.empty()) throw UsageError("empty range `" + text + "`");
    return out;
}

struct BenchArgs {
    std::string nodes = "2^7..2^10";
    std::string features = "2";
    std::string threads_list = "1";
    std::string out = ".";
    EmbedFlags flags;
    std::uint64_t seed = 1;
    int threads = 1;
};

void run_bench(const BenchArgs& a) {
    ManifestWriter manifest;
    manifest.command = "bench";
    manifest.out_dir = a.out;
    manifest.seed = a.seed;
    manifest.flags = a.flags.to_json(a.seed, a.threads);
    manifest.flags["nodes"] = a.nodes;
    manifest.flags["features_per_node"] = a.features;
    manifest.flags["threads_list"] = a.threads_list;

    TrainConfig cfg = a.flags.resolve(a.seed, a.threads);
    std::vector<BenchRow> rows = runtime_benchmark(parse_range(a.nodes), parse_range(a.features),
                                                   parse_range(a.threads_list), cfg, a.seed);

    ensure_out_dir(a.out);
    fs::path bench_path = fs::path(a.out) / "bench.csv";
    std::ofstream out(bench_path);
    out << bench_csv(rows);
    manifest.outputs = {bench_path.string()};
    manifest.emit();
    std::cout << "wrote " << bench_path.string() << " (" << rows.size() << " rows)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attributed multi-scale node embeddings"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    EmbedArgs embed_args;
    CLI::App* embed = app.add_subcommand("embed", "train node and feature embeddings");
    embed->add_option("--edges", embed_args.edges, "edge list file")->required();
    embed->add_option("--features", embed_args.features, "node feature JSON")->required();
    embed->add_option("--out", embed_args.out, "output directory");
    embed->add_option("--seed", embed_args.seed, "RNG seed");
    embed->add_option("--threads", embed_args.threads, "worker threads");
    embed_args.flags.attach(embed);

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "closed-form PMI targets and fit reports");
    oracle->add_option("--edges", oracle_args.edges, "edge list file")->required();
    oracle->add_option("--features", oracle_args.features, "node feature JSON")->required();
    oracle->add_option("--scale", oracle_args.scale, "scale r (1-based)");
    oracle->add_flag("--pooled", oracle_args.pooled, "pooled target over the window");
    oracle->add_option("--window", oracle_args.window, "window size t");
    oracle->add_option("--negatives", oracle_args.negatives, "shift b");
    oracle->add_flag("--ego", oracle_args.ego, "augmented identity features");
    oracle->add_option("--cap", oracle_args.cap, "dense oracle size cap");
    oracle->add_option("--embeddings", oracle_args.embeddings,
                       "embed run directory to score against the target");
    oracle->add_option("--out", oracle_args.out, "output directory");
    oracle->add_option("--seed", oracle_args.seed, "RNG seed");
    oracle->add_option("--threads", oracle_args.threads, "worker threads");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "downstream classification and regression");
    eval->add_option("--embeddings", eval_args.embeddings, "embed run directory")->required();
    eval->add_option("--labels", eval_args.labels, "CSV id,target")->required();
    eval->add_option("--task", eval_args.task, "classify, kshot, or regress");
    eval->add_option("--repeats", eval_args.repeats, "seeded repetitions");
    eval->add_option("--k", eval_args.k, "shots per class for kshot");
    eval->add_option("--train-fraction", eval_args.train_fraction, "train share of the split");
    eval->add_option("--lambda", eval_args.lambda, "regularization strength");
    eval->add_option("--gamma", eval_args.gamma, "l1/l2 mix for regression");
    eval->add_option("--dataset", eval_args.dataset, "dataset name for result rows");
    eval->add_option("--out", eval_args.out, "output directory");
    eval->add_option("--seed", eval_args.seed, "RNG seed");
    eval->add_option("--threads", eval_args.threads, "worker threads");

    LinkPredArgs linkpred_args;
    CLI::App* linkpred = app.add_subcommand("linkpred", "edge-removal link prediction");
    linkpred->add_option("--edges", linkpred_args.edges, "edge list file")->required();
    linkpred->add_option("--features", linkpred_args.features, "node feature JSON")->required();
    linkpred->add_option("--fraction", linkpred_args.fraction, "share of edges removed");
    linkpred->add_option("--lambda", linkpred_args.lambda, "classifier regularization");
    linkpred->add_option("--out", linkpred_args.out, "output directory");
    linkpred->add_option("--seed", linkpred_args.seed, "RNG seed");
    linkpred->add_option("--threads", linkpred_args.threads, "worker threads");
    linkpred_args.flags.attach(linkpred);

    TransferArgs transfer_args;
    CLI::App* transfer = app.add_subcommand("transfer", "frozen-H transfer evaluation");
    transfer->add_option("--source-edges", transfer_args.source_edges, "source edge list")
        ->required();
    transfer->add_option("--source-features", transfer_args.source_features, "source features")
        ->required();
    transfer->add_option("--target-edges", transfer_args.target_edges, "target edge list")
        ->required();
    transfer->add_option("--target-features", transfer_args.target_features, "target features")
        ->required();
    transfer->add_option("--test-feature", transfer_args.test_feature, "held-out feature id")
        ->required();
    transfer->add_option("--repeats", transfer_args.repeats, "seeded repetitions");
    transfer->add_option("--lambda", transfer_args.lambda, "classifier regularization");
    transfer->add_option("--out", transfer_args.out, "output directory");
    transfer->add_option("--seed", transfer_args.seed, "RNG seed");
    transfer->add_option("--threads", transfer_args.threads, "worker threads");
    transfer_args.flags.attach(transfer);

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "scaling benchmark on synthetic graphs");
    bench->add_option("--nodes", bench_args.nodes, "node counts, e.g. 2^7..2^14 or 100,200");
    bench->add_option("--features-per-node", bench_args.features, "feature counts per node");
    bench->add_option("--threads-list", bench_args.threads_list, "thread counts to sweep");
    bench->add_option("--out", bench_args.out, "output directory");
    bench->add_option("--seed", bench_args.seed, "RNG seed");
    bench->add_option("--threads", bench_args.threads, "walker/corpus threads");
    bench_args.flags.attach(bench);
    bench_args.flags.mode = "ae";

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (embed->parsed()) run_embed(embed_args);
        else if (oracle->parsed()) run_oracle(oracle_args);
        else if (eval->parsed()) run_eval(eval_args);
        else if (linkpred->parsed()) run_linkpred(linkpred_args);
        else if (transfer->parsed()) run_transfer(transfer_args);
        else if (bench->parsed()) run_bench(bench_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const CapError& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const TaskError& e) {
        std::cerr << "task error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
