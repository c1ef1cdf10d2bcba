#pragma once

#include <string>
#include <vector>

#include "lwp/graph.hpp"

namespace lwp {

/// Walk generation plus skip-gram settings for the embedding predictors.
/// p = q = 1 gives uniform (first-order) walks; other values bias the walk
/// toward returning (small p) or staying local (large q).
struct EmbeddingConfig {
    int dim = 32;
    int walks_per_node = 10;
    int walk_length = 20;
    int window = 5;
    int negatives = 5;
    double p = 1.0;
    double q = 1.0;
    int epochs = 3;
    double learning_rate = 0.025;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Fixed-length truncated random walks over the unweighted topology,
/// walks_per_node starts from every node. An isolated node yields a
/// single-element walk.
std::vector<std::vector<int>> random_walks(const WeightedGraph& g, const EmbeddingConfig& cfg);

struct SkipgramResult {
    Eigen::MatrixXd embeddings;  // node_count x dim
    std::vector<double> loss_trace;
};

/// Skip-gram with negative sampling over the walk corpus; negatives are drawn
/// from the corpus unigram distribution raised to 3/4.
SkipgramResult train_skipgram(const std::vector<std::vector<int>>& walks, int node_count,
                              const EmbeddingConfig& cfg);

struct RegressorConfig {
    int epochs = 600;
    double learning_rate = 1.0;

    void validate() const;
};

/// Linear model on the Hadamard product of endpoint embeddings, squashed by a
/// sigmoid. Symmetric in (u, v) by construction.
struct LinkRegressor {
    Eigen::MatrixXd embeddings;
    Eigen::VectorXd coef;
    double intercept = 0.0;

    double predict(int u, int v) const;
};

LinkRegressor fit_embedding_regressor(const Eigen::MatrixXd& embeddings,
                                      const std::vector<Edge>& train_edges,
                                      const RegressorConfig& cfg = {});

struct GcnConfig {
    int layers = 2;
    int hidden = 16;
    double learning_rate = 2.0;
    int epochs = 400;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Symmetric-normalized propagation matrix D^{-1/2} (W + I) D^{-1/2} built on
/// the weighted adjacency, so weight changes shift the propagation.
Eigen::MatrixXd gcn_propagation_matrix(const WeightedGraph& g);

/// Stacked propagation with one-hot input features: ReLU between layers, a
/// linear final layer. Returns the node embedding matrix (node_count x
/// columns of the last layer weight).
Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& propagation,
                            const std::vector<Eigen::MatrixXd>& layer_weights);

/// Graph convolutional regressor with a symmetric bilinear decoder:
/// prediction(u, v) = sigmoid(z_u^T S z_v) with S the symmetrized decoder.
struct GcnModel {
    std::vector<Eigen::MatrixXd> layer_weights;
    Eigen::MatrixXd decoder;          // raw; symmetrized on use
    Eigen::MatrixXd node_embeddings;  // cached for the trained graph
    std::vector<double> loss_trace;

    double predict(int u, int v) const;
};

GcnModel train_gcn(const WeightedGraph& observed, const GcnConfig& cfg);

}  // namespace lwp
