#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lwp/graph.hpp"

namespace lwp {

struct SeaConfig {
    int hidden_dim = 64;   // width of the attention space (rho and gamma)
    int embed_dim = 32;    // width of link embeddings B_uv
    double leaky_slope = 0.2;
    double nu = 0.1;       // symmetry-regularization coefficient
    double l2_coeff = 1e-5;
    double learning_rate = 3.0;
    int epochs = 800;
    std::uint64_t seed = 0;
    bool zero_second_order_diag = false;  // drop node degree from the A^2 feature block

    void validate() const;
};

/// Learnable state of the link autoencoder.
///   rho_{u,k} = attn_affine * [h_u || h_k] + attn_bias     (hidden_dim)
///   logit     = LeakyReLU(attn_vector . rho_{u,k})
///   B_{u,v}   = LeakyReLU(agg_matrix * [agg_u || agg_v])   (embed_dim)
///   w'_{u,v}  = sigmoid(decoder_vector . B_{u,v})
/// where h are node features, agg_u is the attention-weighted neighbor
/// feature sum of u, and feature width is 2|V|.
struct SeaParams {
    Eigen::MatrixXd attn_affine;     // hidden_dim x 4|V|
    Eigen::VectorXd attn_bias;       // hidden_dim
    Eigen::VectorXd attn_vector;     // hidden_dim
    Eigen::MatrixXd agg_matrix;      // embed_dim x 4|V|
    Eigen::VectorXd decoder_vector;  // embed_dim

    static SeaParams zeros_like(const SeaParams& shape);
    void add_scaled(const SeaParams& other, double scale);
    double squared_norm() const;
    bool finite() const;
    bool same_shape(const SeaParams& other) const;
};

/// Seeded Glorot-style initialization sized for a node_count-node graph.
SeaParams init_sea_params(int node_count, const SeaConfig& cfg);

/// Node features: row u is [W row u || A^2 row u], width 2|V|.
Eigen::MatrixXd init_node_features(const WeightedGraph& g, bool zero_second_order_diag = false);

/// Mutable forward workspace bound to a fixed topology. Holds the feature
/// matrix (whose left block is the current, possibly perturbed, weight
/// matrix) and the neighbor lists used for attention aggregation. An
/// isolated node aggregates its own feature with attention 1.
class SeaContext {
public:
    explicit SeaContext(const WeightedGraph& observed, bool zero_second_order_diag = false);

    int node_count() const { return node_count_; }
    const Eigen::MatrixXd& features() const { return features_; }

    /// Transposed copy of features(), kept in sync by the setters. Column u
    /// is node u's feature vector, contiguous in memory, which is the access
    /// pattern of the aggregation loops.
    const Eigen::MatrixXd& features_t() const { return features_t_; }

    const std::vector<std::vector<int>>& agg_neighbors() const { return agg_neighbors_; }
    const Eigen::MatrixXd& adjacency() const { return adjacency_; }

    double weight(int u, int v) const { return features_(u, v); }

    /// Updates the weight of a link symmetrically (both feature entries).
    void set_weight(int u, int v, double w);

    /// Updates a single W-block feature entry, leaving its mirror untouched.
    /// Only meaningful for derivative checks against independent entries.
    void set_feature_entry(int i, int j, double value);

    /// Rebuilds a graph from the adjacency and the current weight block.
    WeightedGraph to_graph() const;

private:
    int node_count_ = 0;
    Eigen::MatrixXd features_;
    Eigen::MatrixXd features_t_;
    Eigen::MatrixXd adjacency_;
    std::vector<std::vector<int>> agg_neighbors_;
};

/// A scalar loss over SEA outputs:
///   sum of coef * (target - w'_{u,v})^2 over data terms (ordered pairs)
/// + sum of coef * ||B_{u,v} - B_{v,u}||^2 over sym terms
/// + l2_coeff * squared norm of all parameters.
struct WeightLossSpec {
    struct DataTerm {
        int u, v;
        double target;
        double coef;
    };
    struct SymTerm {
        int u, v;
        double coef;
    };

    std::vector<DataTerm> data_terms;
    std::vector<SymTerm> sym_terms;
    double l2_coeff = 0.0;

    /// Reconstruction objective over every observed link: each link
    /// contributes both ordered directions, and its symmetry penalty carries
    /// coefficient 2*nu to cover both orders of the summation.
    static WeightLossSpec training(const WeightedGraph& observed, double nu, double l2_coeff);

    /// Squared error on a single ordered pair.
    static WeightLossSpec target(int u, int v, double true_weight);
};

struct SeaGradients {
    double loss = 0.0;
    SeaParams d_params;          // filled when want_params
    Eigen::MatrixXd d_weights;   // |V|x|V|, dL/dW_ij per independent entry, zero diagonal; filled when want_weights
};

double sea_loss(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg,
                const WeightLossSpec& spec);

/// Reverse-mode gradients of the loss. Weight gradients treat W entries as
/// independent scalars (symmetrization happens downstream) and hold the
/// adjacency and A^2 feature block constant.
SeaGradients sea_gradient(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg,
                          const WeightLossSpec& spec, bool want_params, bool want_weights);

/// Attention coefficients of node u over ctx.agg_neighbors()[u]; sums to 1.
Eigen::VectorXd attention_coefficients(const SeaContext& ctx, const SeaParams& params,
                                       const SeaConfig& cfg, int u);

/// Link embedding B_{u,v}; order matters (B_uv != B_vu in general).
Eigen::VectorXd link_embedding(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg,
                               int u, int v);

/// Predicted normalized weight sigmoid(decoder . B_uv), strictly in (0,1).
double predict_weight(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg, int u,
                      int v);

struct TrainResult {
    SeaParams params;
    std::vector<double> loss_trace;  // full objective value before each update
};

/// Full-batch gradient descent on the reconstruction objective. The step is
/// scaled by 1 / #data_terms so the default learning rate is insensitive to
/// graph size; the trace records the unscaled objective.
TrainResult train_sea(const ObservedSplit& split, const SeaConfig& cfg);

struct SeaCheckpoint {
    SeaConfig config;
    SeaParams params;
    std::uint64_t split_seed = 0;
    int node_count = 0;
};

void save_checkpoint(const SeaCheckpoint& ckpt, const std::string& path);
SeaCheckpoint load_checkpoint(const std::string& path);

}  // namespace lwp
