#include "lwp/sea.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

namespace lwp {

void SeaConfig::validate() const {
    if (hidden_dim < 1 || embed_dim < 1) throw ValidationError("sea: dims must be >= 1");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw ValidationError("sea: leaky_slope must be in (0,1)");
    if (nu < 0.0) throw ValidationError("sea: nu must be non-negative");
    if (l2_coeff < 0.0) throw ValidationError("sea: l2_coeff must be non-negative");
    if (!(learning_rate > 0.0)) throw ValidationError("sea: learning_rate must be positive");
    if (epochs < 1) throw ValidationError("sea: epochs must be >= 1");
}

SeaParams SeaParams::zeros_like(const SeaParams& shape) {
    SeaParams z;
    z.attn_affine = Eigen::MatrixXd::Zero(shape.attn_affine.rows(), shape.attn_affine.cols());
    z.attn_bias = Eigen::VectorXd::Zero(shape.attn_bias.size());
    z.attn_vector = Eigen::VectorXd::Zero(shape.attn_vector.size());
    z.agg_matrix = Eigen::MatrixXd::Zero(shape.agg_matrix.rows(), shape.agg_matrix.cols());
    z.decoder_vector = Eigen::VectorXd::Zero(shape.decoder_vector.size());
    return z;
}

void SeaParams::add_scaled(const SeaParams& other, double scale) {
    attn_affine += scale * other.attn_affine;
    attn_bias += scale * other.attn_bias;
    attn_vector += scale * other.attn_vector;
    agg_matrix += scale * other.agg_matrix;
    decoder_vector += scale * other.decoder_vector;
}

double SeaParams::squared_norm() const {
    return attn_affine.squaredNorm() + attn_bias.squaredNorm() + attn_vector.squaredNorm() +
           agg_matrix.squaredNorm() + decoder_vector.squaredNorm();
}

bool SeaParams::finite() const {
    return attn_affine.allFinite() && attn_bias.allFinite() && attn_vector.allFinite() &&
           agg_matrix.allFinite() && decoder_vector.allFinite();
}

bool SeaParams::same_shape(const SeaParams& other) const {
    return attn_affine.rows() == other.attn_affine.rows() &&
           attn_affine.cols() == other.attn_affine.cols() && attn_bias.size() == other.attn_bias.size() &&
           attn_vector.size() == other.attn_vector.size() && agg_matrix.rows() == other.agg_matrix.rows() &&
           agg_matrix.cols() == other.agg_matrix.cols() &&
           decoder_vector.size() == other.decoder_vector.size();
}

namespace {

void fill_gaussian(Eigen::MatrixXd& m, double stddev, Rng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = stddev * rng.normal();
    }
}

void fill_gaussian(Eigen::VectorXd& v, double stddev, Rng& rng) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = stddev * rng.normal();
}

}  // namespace

SeaParams init_sea_params(int node_count, const SeaConfig& cfg) {
    cfg.validate();
    if (node_count < 1) throw ValidationError("sea: need at least one node");
    const int feat = 2 * node_count;
    SeaParams p;
    p.attn_affine.resize(cfg.hidden_dim, 2 * feat);
    p.attn_bias = Eigen::VectorXd::Zero(cfg.hidden_dim);
    p.attn_vector.resize(cfg.hidden_dim);
    p.agg_matrix.resize(cfg.embed_dim, 2 * feat);
    p.decoder_vector.resize(cfg.embed_dim);

    Rng r0(mix_seed(cfg.seed, 0)), r1(mix_seed(cfg.seed, 1)), r2(mix_seed(cfg.seed, 2)),
        r3(mix_seed(cfg.seed, 3));
    fill_gaussian(p.attn_affine, std::sqrt(2.0 / (2.0 * feat + cfg.hidden_dim)), r0);
    fill_gaussian(p.attn_vector, std::sqrt(1.0 / cfg.hidden_dim), r1);
    fill_gaussian(p.agg_matrix, std::sqrt(2.0 / (2.0 * feat + cfg.embed_dim)), r2);
    fill_gaussian(p.decoder_vector, std::sqrt(1.0 / cfg.embed_dim), r3);
    return p;
}

Eigen::MatrixXd init_node_features(const WeightedGraph& g, bool zero_second_order_diag) {
    const int n = g.node_count();
    Eigen::MatrixXd h(n, 2 * n);
    h.leftCols(n) = g.weights();
    Eigen::MatrixXd a2 = second_order(g);
    if (zero_second_order_diag) a2.diagonal().setZero();
    h.rightCols(n) = a2;
    return h;
}

SeaContext::SeaContext(const WeightedGraph& observed, bool zero_second_order_diag)
    : node_count_(observed.node_count()),
      features_(init_node_features(observed, zero_second_order_diag)),
      features_t_(features_.transpose()),
      adjacency_(observed.adjacency()) {
    agg_neighbors_.reserve(static_cast<std::size_t>(node_count_));
    for (int u = 0; u < node_count_; ++u) {
        const auto& nb = observed.neighbors()[static_cast<std::size_t>(u)];
        if (nb.empty()) {
            agg_neighbors_.push_back({u});
        } else {
            agg_neighbors_.push_back(nb);
        }
    }
}

void SeaContext::set_weight(int u, int v, double w) {
    if (u < 0 || v < 0 || u >= node_count_ || v >= node_count_ || u == v) {
        throw ValidationError("set_weight: bad node pair");
    }
    features_(u, v) = w;
    features_(v, u) = w;
    features_t_(v, u) = w;
    features_t_(u, v) = w;
}

void SeaContext::set_feature_entry(int i, int j, double value) {
    if (i < 0 || j < 0 || i >= node_count_ || j >= node_count_ || i == j) {
        throw ValidationError("set_feature_entry: bad entry");
    }
    features_(i, j) = value;
    features_t_(j, i) = value;
}

WeightedGraph SeaContext::to_graph() const {
    return WeightedGraph::from_matrices(adjacency_, features_.leftCols(node_count_));
}

WeightLossSpec WeightLossSpec::training(const WeightedGraph& observed, double nu, double l2_coeff) {
    WeightLossSpec spec;
    spec.l2_coeff = l2_coeff;
    spec.data_terms.reserve(2 * static_cast<std::size_t>(observed.edge_count()));
    for (const Edge& e : observed.edges()) {
        spec.data_terms.push_back({e.u, e.v, e.w, 1.0});
        spec.data_terms.push_back({e.v, e.u, e.w, 1.0});
        if (nu > 0.0) spec.sym_terms.push_back({e.u, e.v, 2.0 * nu});
    }
    return spec;
}

WeightLossSpec WeightLossSpec::target(int u, int v, double true_weight) {
    WeightLossSpec spec;
    spec.data_terms.push_back({u, v, true_weight, 1.0});
    return spec;
}

namespace {

double lrelu(double x, double slope) { return x > 0.0 ? x : slope * x; }
double lrelu_grad(double x, double slope) { return x > 0.0 ? 1.0 : slope; }

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void check_shapes(const SeaContext& ctx, const SeaParams& p, const SeaConfig& cfg) {
    const int feat = 2 * ctx.node_count();
    if (p.attn_affine.rows() != cfg.hidden_dim || p.attn_affine.cols() != 2 * feat ||
        p.attn_bias.size() != cfg.hidden_dim || p.attn_vector.size() != cfg.hidden_dim ||
        p.agg_matrix.rows() != cfg.embed_dim || p.agg_matrix.cols() != 2 * feat ||
        p.decoder_vector.size() != cfg.embed_dim) {
        throw ValidationError("sea: parameter shapes do not match config and graph size");
    }
}

void check_pair(const SeaContext& ctx, int u, int v) {
    if (u < 0 || v < 0 || u >= ctx.node_count() || v >= ctx.node_count() || u == v) {
        throw ValidationError("sea: bad node pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
}

// Shared forward state over the nodes whose aggregated features a loss needs.
// Matrices are stored with one COLUMN per agg node so the per-neighbor loops
// walk contiguous memory.
struct Forward {
    Eigen::VectorXd q1, q2;  // attn_affine halves projected through gamma
    double c = 0.0;
    Eigen::VectorXd s1, s2;              // per-node logit contributions
    std::vector<int> nodes;              // agg nodes in ascending order
    std::vector<int> pos;                // node -> column in agg_t (or -1)
    std::vector<Eigen::VectorXd> alpha;  // attention row per agg node
    Eigen::MatrixXd agg_t;               // feat x n_agg
    Eigen::MatrixXd left_t, right_t;     // embed x n_agg: columns O1 agg_u and O2 agg_u
};

Forward run_forward(const SeaContext& ctx, const SeaParams& p, const SeaConfig& cfg,
                    std::vector<int> agg_nodes) {
    const int n = ctx.node_count();
    const int feat = 2 * n;
    const auto& ht = ctx.features_t();

    Forward f;
    f.nodes = std::move(agg_nodes);
    f.pos.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < f.nodes.size(); ++i) f.pos[static_cast<std::size_t>(f.nodes[i])] = static_cast<int>(i);

    f.q1.noalias() = p.attn_affine.leftCols(feat).transpose() * p.attn_vector;
    f.q2.noalias() = p.attn_affine.rightCols(feat).transpose() * p.attn_vector;
    f.c = p.attn_vector.dot(p.attn_bias);
    f.s1.noalias() = ht.transpose() * f.q1;
    f.s2.noalias() = ht.transpose() * f.q2;

    const auto n_agg = static_cast<Eigen::Index>(f.nodes.size());
    f.agg_t = Eigen::MatrixXd::Zero(feat, n_agg);
    f.alpha.resize(f.nodes.size());
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        const int u = f.nodes[i];
        const auto& nb = ctx.agg_neighbors()[static_cast<std::size_t>(u)];
        Eigen::VectorXd logits(static_cast<Eigen::Index>(nb.size()));
        for (std::size_t k = 0; k < nb.size(); ++k) {
            logits(static_cast<Eigen::Index>(k)) = lrelu(f.s1(u) + f.s2(nb[k]) + f.c, cfg.leaky_slope);
        }
        const double m = logits.maxCoeff();
        Eigen::VectorXd a = (logits.array() - m).exp();
        a /= a.sum();
        for (std::size_t k = 0; k < nb.size(); ++k) {
            f.agg_t.col(static_cast<Eigen::Index>(i)) += a(static_cast<Eigen::Index>(k)) * ht.col(nb[k]);
        }
        f.alpha[i] = std::move(a);
    }

    f.left_t.noalias() = p.agg_matrix.leftCols(feat) * f.agg_t;
    f.right_t.noalias() = p.agg_matrix.rightCols(feat) * f.agg_t;
    return f;
}

std::vector<int> collect_agg_nodes(const SeaContext& ctx, const WeightLossSpec& spec) {
    std::vector<char> used(static_cast<std::size_t>(ctx.node_count()), 0);
    const auto mark = [&](int u, int v) {
        check_pair(ctx, u, v);
        used[static_cast<std::size_t>(u)] = 1;
        used[static_cast<std::size_t>(v)] = 1;
    };
    for (const auto& t : spec.data_terms) mark(t.u, t.v);
    for (const auto& t : spec.sym_terms) mark(t.u, t.v);
    std::vector<int> nodes;
    for (int u = 0; u < ctx.node_count(); ++u) {
        if (used[static_cast<std::size_t>(u)]) nodes.push_back(u);
    }
    return nodes;
}

struct PairEval {
    Eigen::VectorXd z;  // pre-activation of B
    Eigen::VectorXd b;
};

PairEval eval_pair(const Forward& f, const SeaConfig& cfg, int u, int v) {
    PairEval pe;
    pe.z = f.left_t.col(f.pos[static_cast<std::size_t>(u)]) + f.right_t.col(f.pos[static_cast<std::size_t>(v)]);
    pe.b = pe.z.unaryExpr([&cfg](double x) { return lrelu(x, cfg.leaky_slope); });
    return pe;
}

}  // namespace

SeaGradients sea_gradient(const SeaContext& ctx, const SeaParams& p, const SeaConfig& cfg,
                          const WeightLossSpec& spec, bool want_params, bool want_weights) {
    check_shapes(ctx, p, cfg);
    const int n = ctx.node_count();
    const int feat = 2 * n;
    const auto& ht = ctx.features_t();

    Forward f = run_forward(ctx, p, cfg, collect_agg_nodes(ctx, spec));
    const auto n_agg = static_cast<Eigen::Index>(f.nodes.size());

    SeaGradients out;
    out.loss = spec.l2_coeff > 0.0 ? spec.l2_coeff * p.squared_norm() : 0.0;

    const bool backward = want_params || want_weights;
    Eigen::MatrixXd dg_left_t, dg_right_t;  // embed x n_agg: dz sums by concatenation slot
    Eigen::VectorXd d_theta;
    if (backward) {
        dg_left_t = Eigen::MatrixXd::Zero(cfg.embed_dim, n_agg);
        dg_right_t = Eigen::MatrixXd::Zero(cfg.embed_dim, n_agg);
        d_theta = Eigen::VectorXd::Zero(cfg.embed_dim);
    }

    for (const auto& t : spec.data_terms) {
        const PairEval pe = eval_pair(f, cfg, t.u, t.v);
        const double score = p.decoder_vector.dot(pe.b);
        const double w_hat = sigmoid(score);
        const double err = t.target - w_hat;
        out.loss += t.coef * err * err;
        if (!backward) continue;
        const double d_score = -2.0 * t.coef * err * w_hat * (1.0 - w_hat);
        if (want_params) d_theta += d_score * pe.b;
        Eigen::VectorXd dz = (d_score * p.decoder_vector.array() *
                              pe.z.unaryExpr([&cfg](double x) { return lrelu_grad(x, cfg.leaky_slope); }).array())
                                 .matrix();
        dg_left_t.col(f.pos[static_cast<std::size_t>(t.u)]) += dz;
        dg_right_t.col(f.pos[static_cast<std::size_t>(t.v)]) += dz;
    }

    for (const auto& t : spec.sym_terms) {
        const PairEval uv = eval_pair(f, cfg, t.u, t.v);
        const PairEval vu = eval_pair(f, cfg, t.v, t.u);
        const Eigen::VectorXd diff = uv.b - vu.b;
        out.loss += t.coef * diff.squaredNorm();
        if (!backward) continue;
        const Eigen::VectorXd db_uv = 2.0 * t.coef * diff;
        Eigen::VectorXd dz_uv =
            (db_uv.array() *
             uv.z.unaryExpr([&cfg](double x) { return lrelu_grad(x, cfg.leaky_slope); }).array())
                .matrix();
        Eigen::VectorXd dz_vu =
            (-db_uv.array() *
             vu.z.unaryExpr([&cfg](double x) { return lrelu_grad(x, cfg.leaky_slope); }).array())
                .matrix();
        dg_left_t.col(f.pos[static_cast<std::size_t>(t.u)]) += dz_uv;
        dg_right_t.col(f.pos[static_cast<std::size_t>(t.v)]) += dz_uv;
        dg_left_t.col(f.pos[static_cast<std::size_t>(t.v)]) += dz_vu;
        dg_right_t.col(f.pos[static_cast<std::size_t>(t.u)]) += dz_vu;
    }

    if (!backward) return out;

    // Flow dz sums back into aggregated features, then through attention.
    Eigen::MatrixXd d_agg_t(feat, n_agg);
    d_agg_t.noalias() = p.agg_matrix.leftCols(feat).transpose() * dg_left_t;
    d_agg_t.noalias() += p.agg_matrix.rightCols(feat).transpose() * dg_right_t;

    Eigen::VectorXd ds1 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ds2 = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd dh_t;
    if (want_weights) dh_t = Eigen::MatrixXd::Zero(feat, n);

    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        const int u = f.nodes[i];
        const auto& nb = ctx.agg_neighbors()[static_cast<std::size_t>(u)];
        const auto& a = f.alpha[i];
        const auto col = static_cast<Eigen::Index>(i);

        Eigen::VectorXd d_alpha(static_cast<Eigen::Index>(nb.size()));
        for (std::size_t k = 0; k < nb.size(); ++k) {
            d_alpha(static_cast<Eigen::Index>(k)) = d_agg_t.col(col).dot(ht.col(nb[k]));
            if (want_weights) dh_t.col(nb[k]) += a(static_cast<Eigen::Index>(k)) * d_agg_t.col(col);
        }
        const double inner = a.dot(d_alpha);
        double sum_dpre = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const auto ki = static_cast<Eigen::Index>(k);
            const double de = a(ki) * (d_alpha(ki) - inner);
            const double dpre = de * lrelu_grad(f.s1(u) + f.s2(nb[k]) + f.c, cfg.leaky_slope);
            ds2(nb[k]) += dpre;
            sum_dpre += dpre;
        }
        ds1(u) += sum_dpre;
    }

    if (want_params) {
        out.d_params = SeaParams::zeros_like(p);
        out.d_params.decoder_vector = d_theta;
        out.d_params.agg_matrix.leftCols(feat).noalias() = dg_left_t * f.agg_t.transpose();
        out.d_params.agg_matrix.rightCols(feat).noalias() = dg_right_t * f.agg_t.transpose();

        const Eigen::VectorXd dq1 = ht * ds1;
        const Eigen::VectorXd dq2 = ht * ds2;
        const double dc = ds1.sum();
        out.d_params.attn_affine.leftCols(feat).noalias() = p.attn_vector * dq1.transpose();
        out.d_params.attn_affine.rightCols(feat).noalias() = p.attn_vector * dq2.transpose();
        out.d_params.attn_vector.noalias() = p.attn_affine.leftCols(feat) * dq1;
        out.d_params.attn_vector.noalias() += p.attn_affine.rightCols(feat) * dq2;
        out.d_params.attn_vector += dc * p.attn_bias;
        out.d_params.attn_bias = dc * p.attn_vector;

        if (spec.l2_coeff > 0.0) out.d_params.add_scaled(p, 2.0 * spec.l2_coeff);
    }

    if (want_weights) {
        dh_t.noalias() += f.q1 * ds1.transpose();
        dh_t.noalias() += f.q2 * ds2.transpose();
        out.d_weights = dh_t.topRows(n).transpose();
        out.d_weights.diagonal().setZero();
    }
    return out;
}

double sea_loss(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg,
                const WeightLossSpec& spec) {
    return sea_gradient(ctx, params, cfg, spec, false, false).loss;
}

Eigen::VectorXd attention_coefficients(const SeaContext& ctx, const SeaParams& params,
                                       const SeaConfig& cfg, int u) {
    check_shapes(ctx, params, cfg);
    if (u < 0 || u >= ctx.node_count()) throw ValidationError("attention_coefficients: bad node");
    const Forward f = run_forward(ctx, params, cfg, {u});
    return f.alpha[0];
}

Eigen::VectorXd link_embedding(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg,
                               int u, int v) {
    check_shapes(ctx, params, cfg);
    check_pair(ctx, u, v);
    std::vector<int> nodes{std::min(u, v), std::max(u, v)};
    const Forward f = run_forward(ctx, params, cfg, std::move(nodes));
    return eval_pair(f, cfg, u, v).b;
}

double predict_weight(const SeaContext& ctx, const SeaParams& params, const SeaConfig& cfg, int u,
                      int v) {
    check_shapes(ctx, params, cfg);
    check_pair(ctx, u, v);
    std::vector<int> nodes{std::min(u, v), std::max(u, v)};
    const Forward f = run_forward(ctx, params, cfg, std::move(nodes));
    return sigmoid(params.decoder_vector.dot(eval_pair(f, cfg, u, v).b));
}

TrainResult train_sea(const ObservedSplit& split, const SeaConfig& cfg) {
    cfg.validate();
    const WeightedGraph& g = split.observed;
    if (g.edge_count() < 1) throw ValidationError("train_sea: observed graph has no edges");
    if (g.max_weight() >= 1.0) {
        throw ValidationError("train_sea: weights must be normalized into (0,1) before training");
    }

    SeaContext ctx(g, cfg.zero_second_order_diag);
    const auto spec = WeightLossSpec::training(g, cfg.nu, cfg.l2_coeff);
    const double step = cfg.learning_rate / static_cast<double>(spec.data_terms.size());

    // Fixed per-column step damping: a feature column whose squared norm
    // exceeds 1 has its parameter steps divided by that norm, so columns on
    // large scales (common-neighbor counts) and small scales (weights) train
    // at comparable effective rates. Computed once; never amplifies a step.
    const Eigen::VectorXd col_ssq = ctx.features().colwise().squaredNorm();
    const Eigen::ArrayXd damp = col_ssq.array().max(1.0).inverse();
    const auto damp_feature_columns = [&damp](Eigen::MatrixXd& m) {
        const auto feat = static_cast<Eigen::Index>(damp.size());
        m.leftCols(feat).array().rowwise() *= damp.transpose();
        m.rightCols(feat).array().rowwise() *= damp.transpose();
    };

    TrainResult result;
    result.params = init_sea_params(g.node_count(), cfg);
    result.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto grads = sea_gradient(ctx, result.params, cfg, spec, true, false);
        if (!std::isfinite(grads.loss)) {
            throw TrainingError("training diverged (non-finite loss) at epoch " + std::to_string(epoch));
        }
        result.loss_trace.push_back(grads.loss);
        damp_feature_columns(grads.d_params.attn_affine);
        damp_feature_columns(grads.d_params.agg_matrix);
        result.params.add_scaled(grads.d_params, -step);
    }
    if (!result.params.finite()) {
        throw TrainingError("training diverged (non-finite parameters) at epoch " +
                            std::to_string(cfg.epochs));
    }
    return result;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    auto data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    }
    j["data"] = std::move(data);
    return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw ParseError("checkpoint: matrix shape does not match data length");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[idx++].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    auto data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v(i));
    return data;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

}  // namespace

void save_checkpoint(const SeaCheckpoint& ckpt, const std::string& path) {
    nlohmann::json j;
    j["format"] = "sea-checkpoint-v1";
    j["split_seed"] = ckpt.split_seed;
    j["node_count"] = ckpt.node_count;
    j["config"] = {{"hidden_dim", ckpt.config.hidden_dim},
                   {"embed_dim", ckpt.config.embed_dim},
                   {"leaky_slope", ckpt.config.leaky_slope},
                   {"nu", ckpt.config.nu},
                   {"l2_coeff", ckpt.config.l2_coeff},
                   {"learning_rate", ckpt.config.learning_rate},
                   {"epochs", ckpt.config.epochs},
                   {"seed", ckpt.config.seed},
                   {"zero_second_order_diag", ckpt.config.zero_second_order_diag}};
    j["params"] = {{"attn_affine", matrix_to_json(ckpt.params.attn_affine)},
                   {"attn_bias", vector_to_json(ckpt.params.attn_bias)},
                   {"attn_vector", vector_to_json(ckpt.params.attn_vector)},
                   {"agg_matrix", matrix_to_json(ckpt.params.agg_matrix)},
                   {"decoder_vector", vector_to_json(ckpt.params.decoder_vector)}};
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << j.dump(1) << '\n';
    if (!out) throw ValidationError("write failed for " + path);
}

SeaCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint " + path + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "sea-checkpoint-v1") {
            throw ParseError("checkpoint " + path + ": unknown format tag");
        }
        SeaCheckpoint ckpt;
        ckpt.split_seed = j.at("split_seed").get<std::uint64_t>();
        ckpt.node_count = j.at("node_count").get<int>();
        const auto& c = j.at("config");
        ckpt.config.hidden_dim = c.at("hidden_dim").get<int>();
        ckpt.config.embed_dim = c.at("embed_dim").get<int>();
        ckpt.config.leaky_slope = c.at("leaky_slope").get<double>();
        ckpt.config.nu = c.at("nu").get<double>();
        ckpt.config.l2_coeff = c.at("l2_coeff").get<double>();
        ckpt.config.learning_rate = c.at("learning_rate").get<double>();
        ckpt.config.epochs = c.at("epochs").get<int>();
        ckpt.config.seed = c.at("seed").get<std::uint64_t>();
        ckpt.config.zero_second_order_diag = c.at("zero_second_order_diag").get<bool>();
        const auto& p = j.at("params");
        ckpt.params.attn_affine = matrix_from_json(p.at("attn_affine"));
        ckpt.params.attn_bias = vector_from_json(p.at("attn_bias"));
        ckpt.params.attn_vector = vector_from_json(p.at("attn_vector"));
        ckpt.params.agg_matrix = matrix_from_json(p.at("agg_matrix"));
        ckpt.params.decoder_vector = vector_from_json(p.at("decoder_vector"));

        ckpt.config.validate();
        const int feat = 2 * ckpt.node_count;
        if (ckpt.params.attn_affine.rows() != ckpt.config.hidden_dim ||
            ckpt.params.attn_affine.cols() != 2 * feat ||
            ckpt.params.agg_matrix.rows() != ckpt.config.embed_dim ||
            ckpt.params.agg_matrix.cols() != 2 * feat ||
            ckpt.params.attn_bias.size() != ckpt.config.hidden_dim ||
            ckpt.params.attn_vector.size() != ckpt.config.hidden_dim ||
            ckpt.params.decoder_vector.size() != ckpt.config.embed_dim) {
            throw ParseError("checkpoint " + path + ": parameter shapes disagree with config");
        }
        if (!ckpt.params.finite()) throw ParseError("checkpoint " + path + ": non-finite parameters");
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint " + path + ": " + e.what());
    }
}

}  // namespace lwp
