#include "lwp/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace lwp {

void EmbeddingConfig::validate() const {
    if (dim < 1) throw ValidationError("embedding: dim must be >= 1");
    if (walks_per_node < 1) throw ValidationError("embedding: walks_per_node must be >= 1");
    if (walk_length < 1) throw ValidationError("embedding: walk_length must be >= 1");
    if (window < 1) throw ValidationError("embedding: window must be >= 1");
    if (negatives < 1) throw ValidationError("embedding: negatives must be >= 1");
    if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("embedding: p and q must be positive");
    if (epochs < 1) throw ValidationError("embedding: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ValidationError("embedding: learning_rate must be positive");
}

namespace {

int pick_weighted(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (const double w : weights) total += w;
    const double r = rng.unit() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

std::vector<std::vector<int>> random_walks(const WeightedGraph& g, const EmbeddingConfig& cfg) {
    cfg.validate();
    const int n = g.node_count();
    const auto& nbrs = g.neighbors();

    std::vector<std::vector<int>> walks;
    walks.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(cfg.walks_per_node));
    Rng rng(cfg.seed);
    std::vector<double> bias;

    for (int round = 0; round < cfg.walks_per_node; ++round) {
        for (int start = 0; start < n; ++start) {
            std::vector<int> walk{start};
            if (nbrs[static_cast<std::size_t>(start)].empty()) {
                walks.push_back(std::move(walk));
                continue;
            }
            walk.reserve(static_cast<std::size_t>(cfg.walk_length));
            while (static_cast<int>(walk.size()) < cfg.walk_length) {
                const int cur = walk.back();
                const auto& options = nbrs[static_cast<std::size_t>(cur)];
                int next;
                if (walk.size() == 1 || (cfg.p == 1.0 && cfg.q == 1.0)) {
                    next = options[rng.index(options.size())];
                } else {
                    const int prev = walk[walk.size() - 2];
                    bias.assign(options.size(), 0.0);
                    for (std::size_t k = 0; k < options.size(); ++k) {
                        const int x = options[k];
                        if (x == prev) {
                            bias[k] = 1.0 / cfg.p;
                        } else if (g.has_edge(prev, x)) {
                            bias[k] = 1.0;
                        } else {
                            bias[k] = 1.0 / cfg.q;
                        }
                    }
                    next = options[static_cast<std::size_t>(pick_weighted(bias, rng))];
                }
                walk.push_back(next);
            }
            walks.push_back(std::move(walk));
        }
    }
    return walks;
}

namespace {

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Cumulative table for the corpus unigram distribution ^ 0.75.
struct NegativeSampler {
    std::vector<double> cumulative;

    explicit NegativeSampler(const std::vector<double>& counts) {
        cumulative.reserve(counts.size());
        double acc = 0.0;
        for (const double c : counts) {
            acc += std::pow(c, 0.75);
            cumulative.push_back(acc);
        }
    }

    int draw(Rng& rng) const {
        const double r = rng.unit() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        return static_cast<int>(std::distance(cumulative.begin(), it));
    }
};

}  // namespace

SkipgramResult train_skipgram(const std::vector<std::vector<int>>& walks, int node_count,
                              const EmbeddingConfig& cfg) {
    cfg.validate();
    if (walks.empty()) throw ValidationError("skipgram: empty walk corpus");
    if (node_count < 1) throw ValidationError("skipgram: node_count must be >= 1");
    for (const auto& walk : walks) {
        for (const int node : walk) {
            if (node < 0 || node >= node_count) throw ValidationError("skipgram: walk node out of range");
        }
    }

    std::vector<double> counts(static_cast<std::size_t>(node_count), 0.0);
    for (const auto& walk : walks) {
        for (const int node : walk) counts[static_cast<std::size_t>(node)] += 1.0;
    }
    const NegativeSampler sampler(counts);

    Rng rng(mix_seed(cfg.seed, 1));
    Eigen::MatrixXd in_vec(node_count, cfg.dim);
    for (int i = 0; i < node_count; ++i) {
        for (int d = 0; d < cfg.dim; ++d) in_vec(i, d) = (rng.unit() - 0.5) / cfg.dim;
    }
    Eigen::MatrixXd out_vec = Eigen::MatrixXd::Zero(node_count, cfg.dim);

    SkipgramResult result;
    result.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));
    Eigen::VectorXd grad_center(cfg.dim);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss = 0.0;
        std::size_t pairs = 0;
        for (const auto& walk : walks) {
            const int len = static_cast<int>(walk.size());
            for (int i = 0; i < len; ++i) {
                const int center = walk[i];
                const int lo = std::max(0, i - cfg.window);
                const int hi = std::min(len - 1, i + cfg.window);
                for (int j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const int context = walk[static_cast<std::size_t>(j)];
                    grad_center.setZero();

                    const double pos_score = sigmoid(in_vec.row(center).dot(out_vec.row(context)));
                    loss -= std::log(std::max(pos_score, 1e-12));
                    const double pos_err = pos_score - 1.0;
                    grad_center += pos_err * out_vec.row(context).transpose();
                    out_vec.row(context) -= cfg.learning_rate * pos_err * in_vec.row(center);

                    for (int s = 0; s < cfg.negatives; ++s) {
                        const int neg = sampler.draw(rng);
                        const double neg_score = sigmoid(in_vec.row(center).dot(out_vec.row(neg)));
                        loss -= std::log(std::max(1.0 - neg_score, 1e-12));
                        grad_center += neg_score * out_vec.row(neg).transpose();
                        out_vec.row(neg) -= cfg.learning_rate * neg_score * in_vec.row(center);
                    }
                    in_vec.row(center) -= cfg.learning_rate * grad_center.transpose();
                    ++pairs;
                }
            }
        }
        result.loss_trace.push_back(pairs > 0 ? loss / static_cast<double>(pairs) : 0.0);
    }
    if (!in_vec.allFinite()) throw TrainingError("skipgram training produced non-finite embeddings");
    result.embeddings = std::move(in_vec);
    return result;
}

void RegressorConfig::validate() const {
    if (epochs < 1) throw ValidationError("regressor: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ValidationError("regressor: learning_rate must be positive");
}

double LinkRegressor::predict(int u, int v) const {
    const int n = static_cast<int>(embeddings.rows());
    if (u < 0 || v < 0 || u >= n || v >= n) throw ValidationError("regressor: node out of range");
    const Eigen::VectorXd x =
        embeddings.row(u).cwiseProduct(embeddings.row(v)).transpose();
    return sigmoid(coef.dot(x) + intercept);
}

LinkRegressor fit_embedding_regressor(const Eigen::MatrixXd& embeddings,
                                      const std::vector<Edge>& train_edges,
                                      const RegressorConfig& cfg) {
    cfg.validate();
    if (train_edges.empty()) throw ValidationError("regressor: need at least one training edge");
    const int n = static_cast<int>(embeddings.rows());
    const int dim = static_cast<int>(embeddings.cols());

    Eigen::MatrixXd features(static_cast<Eigen::Index>(train_edges.size()), dim);
    Eigen::VectorXd targets(static_cast<Eigen::Index>(train_edges.size()));
    for (std::size_t i = 0; i < train_edges.size(); ++i) {
        const Edge& e = train_edges[i];
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
            throw ValidationError("regressor: edge endpoint out of range");
        }
        features.row(static_cast<Eigen::Index>(i)) =
            embeddings.row(e.u).cwiseProduct(embeddings.row(e.v));
        targets(static_cast<Eigen::Index>(i)) = e.w;
    }

    LinkRegressor model;
    model.embeddings = embeddings;
    model.coef = Eigen::VectorXd::Zero(dim);
    model.intercept = 0.0;

    const double scale = 1.0 / static_cast<double>(train_edges.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const Eigen::VectorXd scores =
            ((features * model.coef).array() + model.intercept).unaryExpr([](double t) {
                return sigmoid(t);
            });
        const Eigen::VectorXd err = scores - targets;
        const Eigen::VectorXd dscore =
            2.0 * scale * err.array() * scores.array() * (1.0 - scores.array());
        model.coef -= cfg.learning_rate * (features.transpose() * dscore);
        model.intercept -= cfg.learning_rate * dscore.sum();
    }
    if (!model.coef.allFinite() || !std::isfinite(model.intercept)) {
        throw TrainingError("embedding regressor diverged");
    }
    return model;
}

void GcnConfig::validate() const {
    if (layers < 1) throw ValidationError("gcn: layers must be >= 1");
    if (hidden < 1) throw ValidationError("gcn: hidden must be >= 1");
    if (!(learning_rate > 0.0)) throw ValidationError("gcn: learning_rate must be positive");
    if (epochs < 1) throw ValidationError("gcn: epochs must be >= 1");
}

Eigen::MatrixXd gcn_propagation_matrix(const WeightedGraph& g) {
    const int n = g.node_count();
    Eigen::MatrixXd a = g.weights() + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd inv_sqrt(n);
    for (int i = 0; i < n; ++i) inv_sqrt(i) = 1.0 / std::sqrt(a.row(i).sum());
    return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& propagation,
                            const std::vector<Eigen::MatrixXd>& layer_weights) {
    if (layer_weights.empty()) throw ValidationError("gcn: need at least one layer");
    Eigen::MatrixXd z = propagation * layer_weights.front();
    for (std::size_t l = 1; l < layer_weights.size(); ++l) {
        z = z.cwiseMax(0.0);
        z = propagation * z * layer_weights[l];
    }
    return z;
}

double GcnModel::predict(int u, int v) const {
    const int n = static_cast<int>(node_embeddings.rows());
    if (u < 0 || v < 0 || u >= n || v >= n) throw ValidationError("gcn: node out of range");
    // Evaluate in canonical endpoint order so both orientations share one
    // floating-point summation order.
    const Eigen::MatrixXd s = 0.5 * (decoder + decoder.transpose());
    const Eigen::VectorXd zu = node_embeddings.row(std::min(u, v)).transpose();
    const Eigen::VectorXd zv = node_embeddings.row(std::max(u, v)).transpose();
    return sigmoid(zu.dot(s * zv));
}

GcnModel train_gcn(const WeightedGraph& observed, const GcnConfig& cfg) {
    cfg.validate();
    if (observed.node_count() < 1) throw ValidationError("gcn: empty graph");
    if (observed.edge_count() < 1) throw ValidationError("gcn: graph has no links to fit");

    const int n = observed.node_count();
    const Eigen::MatrixXd prop = gcn_propagation_matrix(observed);
    const auto& edges = observed.edges();
    const double scale = 1.0 / static_cast<double>(edges.size());

    GcnModel model;
    Rng r0(mix_seed(cfg.seed, 0));
    for (int l = 0; l < cfg.layers; ++l) {
        const int rows = l == 0 ? n : cfg.hidden;
        Eigen::MatrixXd w(rows, cfg.hidden);
        const double stddev = std::sqrt(2.0 / static_cast<double>(rows + cfg.hidden));
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cfg.hidden; ++j) w(i, j) = stddev * r0.normal();
        }
        model.layer_weights.push_back(std::move(w));
    }
    Rng r1(mix_seed(cfg.seed, 1));
    model.decoder.resize(cfg.hidden, cfg.hidden);
    const double dec_std = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
    for (int i = 0; i < cfg.hidden; ++i) {
        for (int j = 0; j < cfg.hidden; ++j) model.decoder(i, j) = dec_std * r1.normal();
    }

    const int depth = cfg.layers;
    std::vector<Eigen::MatrixXd> pre(depth);   // propagation * input * W before relu
    std::vector<Eigen::MatrixXd> post(depth);  // after relu (last layer stays linear)
    model.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Forward.
        pre[0] = prop * model.layer_weights[0];
        for (int l = 0; l < depth; ++l) {
            if (l > 0) pre[l] = prop * post[l - 1] * model.layer_weights[l];
            post[l] = l + 1 < depth ? pre[l].cwiseMax(0.0) : pre[l];
        }
        const Eigen::MatrixXd& z = post[depth - 1];
        const Eigen::MatrixXd s = 0.5 * (model.decoder + model.decoder.transpose());

        double loss = 0.0;
        Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(n, cfg.hidden);
        Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(cfg.hidden, cfg.hidden);
        for (const Edge& e : edges) {
            const Eigen::VectorXd zu = z.row(e.u).transpose();
            const Eigen::VectorXd zv = z.row(e.v).transpose();
            const double pred = sigmoid(zu.dot(s * zv));
            const double err = pred - e.w;
            loss += scale * err * err;
            const double dscore = 2.0 * scale * err * pred * (1.0 - pred);
            ds.noalias() += dscore * zu * zv.transpose();
            dz.row(e.u) += dscore * (s * zv).transpose();
            dz.row(e.v) += dscore * (s.transpose() * zu).transpose();
        }
        if (!std::isfinite(loss)) {
            throw TrainingError("gcn training diverged (non-finite loss) at epoch " +
                                std::to_string(epoch));
        }
        model.loss_trace.push_back(loss);

        // Backward through the stack.
        const Eigen::MatrixXd d_decoder = 0.5 * (ds + ds.transpose());
        std::vector<Eigen::MatrixXd> d_layers(depth);
        Eigen::MatrixXd grad = dz;
        for (int l = depth - 1; l >= 0; --l) {
            if (l + 1 < depth) {
                grad = (pre[l].array() > 0.0).select(grad, 0.0);
            }
            // Relies on the propagation matrix being symmetric.
            const Eigen::MatrixXd propagated = prop * grad;
            d_layers[l] = l == 0 ? propagated
                                 : Eigen::MatrixXd(post[l - 1].transpose() * propagated);
            if (l > 0) grad = propagated * model.layer_weights[l].transpose();
        }

        model.decoder -= cfg.learning_rate * d_decoder;
        for (int l = 0; l < depth; ++l) {
            model.layer_weights[l] -= cfg.learning_rate * d_layers[l];
        }
    }

    model.node_embeddings = gcn_forward(prop, model.layer_weights);
    if (!model.node_embeddings.allFinite()) {
        throw TrainingError("gcn training diverged (non-finite embeddings) at epoch " +
                            std::to_string(cfg.epochs));
    }
    return model;
}

}  // namespace lwp
