#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "musae/graph.hpp"
#include "musae/trainer.hpp"

namespace musae {

// Train/test index partition. Indices are disjoint and together cover
// every row exactly once.
struct SplitIndices {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> test;
};

struct LabeledDataset {
    Matrix x;
    std::vector<int> labels;      // classification
    std::vector<double> targets;  // regression
    SplitIndices split;
};

// Stratified split for classification: shuffles within each class so every
// class present in the data stays present in the train side.
SplitIndices stratified_split(const std::vector<int>& labels, double train_fraction,
                              std::uint64_t seed);

// Plain shuffled split for regression targets.
SplitIndices random_split(std::size_t count, double train_fraction, std::uint64_t seed);

struct LogReg {
    std::size_t classes = 0;
    std::size_t dim = 0;
    std::vector<double> weights;      // classes x (dim + 1), bias last
    std::vector<int> label_values;    // class index -> original label

    int predict_one(const double* row) const;
    std::vector<int> predict(const Matrix& x) const;
    std::vector<int> predict(const Matrix& x, const std::vector<std::uint32_t>& rows) const;
    // two-class decision value, larger means second class more likely
    double binary_score(const double* row) const;
};

LogReg train_logreg(const Matrix& x, const std::vector<int>& labels,
                    const std::vector<std::uint32_t>& train_rows, double lambda = 0.01);

double micro_f1(const std::vector<int>& pred, const std::vector<int>& truth);

struct ScoreSeries {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::vector<double> per_seed;
};

ScoreSeries kshot_eval(const Matrix& x, const std::vector<int>& labels, std::uint32_t k,
                       const std::vector<std::uint64_t>& seeds, double lambda = 0.01);

struct ElasticNet {
    std::vector<double> weights;
    double bias = 0.0;

    double predict_one(const double* row) const;
    std::vector<double> predict(const Matrix& x) const;
    std::vector<double> predict(const Matrix& x, const std::vector<std::uint32_t>& rows) const;
};

ElasticNet train_elastic_net(const Matrix& x, const std::vector<double>& targets,
                             const std::vector<std::uint32_t>& train_rows,
                             double lambda = 0.01, double gamma = 0.5);

double r2(const std::vector<double>& pred, const std::vector<double>& truth);

struct LinkSplit {
    Graph train_graph;
    std::vector<Edge> positives;
    std::vector<Edge> negatives;
};

LinkSplit link_split(const Graph& g, double fraction, std::uint64_t seed);

enum class EdgeOp { Average, Hadamard, L1, L2 };

const char* edge_op_name(EdgeOp op);

std::vector<double> edge_features(const std::vector<double>& u, const std::vector<double>& v,
                                  EdgeOp op);

double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Link prediction over one split: scores every positive and negative pair
// with a logistic model per operator, reports AUC for each.
struct LinkPredReport {
    double auc_by_op[4] = {0, 0, 0, 0};
    EdgeOp best_op = EdgeOp::Average;
    double best_auc = 0.0;
};

LinkPredReport link_prediction_eval(const Graph& g, const FeatureStore& features,
                                    const TrainConfig& config, double fraction,
                                    double lambda, std::uint64_t seed);

struct TransferConfig {
    TrainConfig embed;
    double lambda = 0.01;
    std::vector<std::uint64_t> seeds;
};

ScoreSeries transfer_eval(const Graph& source, const FeatureStore& source_features,
                          const Graph& target, const FeatureStore& target_features,
                          FeatureId test_feature, const TransferConfig& config);

struct BenchRow {
    std::uint32_t nodes = 0;
    std::uint32_t features_per_node = 0;
    std::uint32_t threads = 0;
    double seconds = 0.0;
};

std::vector<BenchRow> runtime_benchmark(const std::vector<std::uint32_t>& node_range,
                                        const std::vector<std::uint32_t>& feature_range,
                                        const std::vector<std::uint32_t>& thread_range,
                                        const TrainConfig& base, std::uint64_t seed);

std::string bench_csv(const std::vector<BenchRow>& rows);

struct ResultRow {
    std::string task;
    std::string dataset;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
};

std::string results_csv(const std::vector<ResultRow>& rows);

}  // namespace musae
