#include "lwp/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

namespace lwp {

AttackMode attack_mode_from_string(const std::string& name) {
    if (name == "global") return AttackMode::global;
    if (name == "local") return AttackMode::local;
    throw ValidationError("unknown attack mode '" + name + "' (expected global or local)");
}

std::string to_string(AttackMode mode) { return mode == AttackMode::global ? "global" : "local"; }

void StepRule::validate() const {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ValidationError("attack: step value must be finite and non-negative");
    }
}

int AttackConfig::resolved_budget() const { return budget.value_or(iterations * per_iteration); }

void AttackConfig::validate() const {
    if (iterations < 0) throw ValidationError("attack: iterations must be >= 0");
    if (per_iteration < 1) throw ValidationError("attack: per_iteration must be >= 1");
    if (budget && *budget < 1) throw ValidationError("attack: budget must be >= 1 when given");
    if (!(clamp_lo >= 0.0 && clamp_lo < clamp_hi && clamp_hi <= 1.0)) {
        throw ValidationError("attack: clamp bounds must satisfy 0 <= lo < hi <= 1");
    }
    step_rule.validate();
}

int degree_sum(const WeightedGraph& observed, int u, int v) {
    observed.check_node(u);
    observed.check_node(v);
    return observed.degree(u) + observed.degree(v);
}

TargetSpec TargetSpec::sample(const ObservedSplit& split, int count, std::uint64_t seed) {
    const auto& pool = split.test_edges;
    if (count < 1) throw ValidationError("target sample: count must be >= 1");
    if (static_cast<std::size_t>(count) > pool.size()) {
        throw ValidationError("target sample: requested " + std::to_string(count) + " targets but only " +
                              std::to_string(pool.size()) + " withheld links exist");
    }
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
        const std::size_t j = i + rng.index(order.size() - i);
        std::swap(order[i], order[j]);
    }

    TargetSpec spec;
    spec.targets.reserve(static_cast<std::size_t>(count));
    spec.degree_sums.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Edge& e = pool[order[static_cast<std::size_t>(i)]];
        spec.targets.push_back({e.u, e.v, e.w});
        spec.degree_sums.push_back(degree_sum(split.observed, e.u, e.v));
    }
    return spec;
}

LinkMask LinkMask::build(AttackMode mode, const WeightedGraph& observed, const Target& target) {
    observed.check_node(target.u);
    observed.check_node(target.v);
    if (target.u == target.v) throw ValidationError("mask: target endpoints must differ");

    LinkMask mask;
    mask.node_count_ = observed.node_count();
    mask.dense_.assign(static_cast<std::size_t>(mask.node_count_) * static_cast<std::size_t>(mask.node_count_), 0);
    const int tu = std::min(target.u, target.v);
    const int tv = std::max(target.u, target.v);
    for (const Edge& e : observed.edges()) {
        if (e.u == tu && e.v == tv) continue;
        if (mode == AttackMode::local && e.u != target.u && e.u != target.v && e.v != target.u &&
            e.v != target.v) {
            continue;
        }
        mask.links_.emplace_back(e.u, e.v);
        mask.dense_[static_cast<std::size_t>(e.u) * static_cast<std::size_t>(mask.node_count_) +
                    static_cast<std::size_t>(e.v)] = 1;
        mask.dense_[static_cast<std::size_t>(e.v) * static_cast<std::size_t>(mask.node_count_) +
                    static_cast<std::size_t>(e.u)] = 1;
    }
    return mask;
}

bool LinkMask::admits(int u, int v) const {
    if (u < 0 || v < 0 || u >= node_count_ || v >= node_count_) return false;
    return dense_[static_cast<std::size_t>(u) * static_cast<std::size_t>(node_count_) +
                  static_cast<std::size_t>(v)] != 0;
}

Eigen::MatrixXd symmetrize_gradient(const Eigen::MatrixXd& g) {
    if (g.rows() != g.cols()) throw ValidationError("symmetrize: matrix must be square");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < g.cols(); ++j) out(i, j) = 0.5 * (g(i, j) + g(j, i));
    }
    return out;
}

double target_loss(const SeaContext& ctx, const SeaParams& params, const SeaConfig& sea_cfg,
                   const Target& target) {
    return sea_loss(ctx, params, sea_cfg, WeightLossSpec::target(target.u, target.v, target.true_weight));
}

std::string to_string(SkipReason reason) {
    switch (reason) {
        case SkipReason::zero_gradient: return "zero_gradient";
        case SkipReason::saturated: return "saturated";
        case SkipReason::budget_spent: return "budget_spent";
        case SkipReason::already_touched: return "already_touched";
    }
    return "unknown";
}

namespace {

double signed_step(const StepRule& rule, double grad) {
    if (rule.kind == StepRule::Kind::gradient_scaled) return rule.value * grad;
    return grad > 0.0 ? rule.value : -rule.value;
}

// A zero step must leave the weight alone even when the weight already sits
// outside the clamp window (normalized weights can undershoot clamp_lo).
double apply_move(double w, double delta, double lo, double hi) {
    return delta == 0.0 ? w : std::clamp(w + delta, lo, hi);
}

bool pair_touched(const std::vector<std::pair<int, int>>& touched, int u, int v) {
    return std::binary_search(touched.begin(), touched.end(), std::make_pair(u, v));
}

}  // namespace

PerturbationMatrix perturbation_step(const SeaContext& state, const Eigen::MatrixXd& sym_grad,
                                     const AttackConfig& cfg, const LinkMask& mask,
                                     const std::vector<std::pair<int, int>>& touched) {
    const int n = state.node_count();
    if (sym_grad.rows() != n || sym_grad.cols() != n) {
        throw ValidationError("perturbation step: gradient shape mismatch");
    }

    struct Candidate {
        double magnitude;
        int u, v;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(mask.links().size());
    for (const auto& [u, v] : mask.links()) {
        if (state.adjacency()(u, v) == 0.0) continue;
        candidates.push_back({std::abs(sym_grad(u, v)), u, v});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
        return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
    });

    PerturbationMatrix out;
    out.delta = Eigen::MatrixXd::Zero(n, n);
    const int budget = cfg.resolved_budget();
    int distinct = static_cast<int>(touched.size());

    for (const Candidate& c : candidates) {
        if (static_cast<int>(out.selected.size()) >= cfg.per_iteration) break;
        const double grad = sym_grad(c.u, c.v);
        if (grad == 0.0) {
            out.skipped.push_back({0, c.u, c.v, SkipReason::zero_gradient});
            continue;
        }
        const bool seen = pair_touched(touched, c.u, c.v) ||
                          std::find(out.selected.begin(), out.selected.end(),
                                    std::make_pair(c.u, c.v)) != out.selected.end();
        if (seen && cfg.distinct_only) {
            out.skipped.push_back({0, c.u, c.v, SkipReason::already_touched});
            continue;
        }
        if (!seen && distinct >= budget) {
            out.skipped.push_back({0, c.u, c.v, SkipReason::budget_spent});
            continue;
        }
        const double step = signed_step(cfg.step_rule, grad);
        const double w = state.weight(c.u, c.v);
        if (step != 0.0 && apply_move(w, step, cfg.clamp_lo, cfg.clamp_hi) == w) {
            out.skipped.push_back({0, c.u, c.v, SkipReason::saturated});
            continue;
        }
        out.delta(c.u, c.v) = step;
        out.delta(c.v, c.u) = step;
        out.selected.emplace_back(c.u, c.v);
        if (!seen) ++distinct;
    }
    out.exhausted = static_cast<int>(out.selected.size()) < cfg.per_iteration;
    return out;
}

AttackOutcome run_iga_lwp(const WeightedGraph& observed, const SeaParams& params,
                          const SeaConfig& sea_cfg, const Target& target, const AttackConfig& cfg) {
    cfg.validate();
    sea_cfg.validate();
    observed.check_node(target.u);
    observed.check_node(target.v);
    if (target.u == target.v) throw ValidationError("attack: target endpoints must differ");

    SeaContext ctx(observed, sea_cfg.zero_second_order_diag);
    const LinkMask mask = LinkMask::build(cfg.mode, observed, target);
    const auto loss_spec = WeightLossSpec::target(target.u, target.v, target.true_weight);

    AttackOutcome out;
    out.trace.initial_loss = sea_loss(ctx, params, sea_cfg, loss_spec);
    out.trace.final_loss = out.trace.initial_loss;

    std::vector<std::pair<int, int>> touched;
    for (int h = 1; h <= cfg.iterations; ++h) {
        const auto grads = sea_gradient(ctx, params, sea_cfg, loss_spec, false, true);
        if (!grads.d_weights.allFinite()) {
            throw AttackError("non-finite weight gradient at iteration " + std::to_string(h));
        }
        const Eigen::MatrixXd sym = symmetrize_gradient(grads.d_weights);
        auto step = perturbation_step(ctx, sym, cfg, mask, touched);

        for (auto& skip : step.skipped) {
            skip.iteration = h;
            out.trace.skips.push_back(skip);
        }
        if (step.selected.empty()) {
            out.trace.budget_exhausted = true;
            break;
        }

        for (const auto& [u, v] : step.selected) {
            const double before = ctx.weight(u, v);
            const double after = apply_move(before, step.delta(u, v), cfg.clamp_lo, cfg.clamp_hi);
            ctx.set_weight(u, v, after);
            out.trace.steps.push_back({h, u, v, after - before, 0.0});
            const auto pos = std::lower_bound(touched.begin(), touched.end(), std::make_pair(u, v));
            if (pos == touched.end() || *pos != std::make_pair(u, v)) touched.insert(pos, {u, v});
        }
        const double loss = sea_loss(ctx, params, sea_cfg, loss_spec);
        for (auto it = out.trace.steps.rbegin();
             it != out.trace.steps.rend() && it->iteration == h; ++it) {
            it->loss_after = loss;
        }
        out.trace.final_loss = loss;
        out.trace.iterations_run = h;
        if (step.exhausted) {
            out.trace.budget_exhausted = true;
            break;
        }
    }

    out.trace.touched = std::move(touched);
    out.adversarial = ctx.to_graph();
    return out;
}

void save_attack_trace(const AttackTrace& trace, const std::string& path) {
    nlohmann::json j;
    j["initial_loss"] = trace.initial_loss;
    j["final_loss"] = trace.final_loss;
    j["iterations_run"] = trace.iterations_run;
    j["budget_exhausted"] = trace.budget_exhausted;
    auto steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"iteration", s.iteration},
                         {"u", s.u},
                         {"v", s.v},
                         {"step", s.step},
                         {"loss_after", s.loss_after}});
    }
    j["steps"] = std::move(steps);
    auto skips = nlohmann::json::array();
    for (const auto& s : trace.skips) {
        skips.push_back({{"iteration", s.iteration}, {"u", s.u}, {"v", s.v}, {"reason", to_string(s.reason)}});
    }
    j["skips"] = std::move(skips);
    auto touched = nlohmann::json::array();
    for (const auto& [u, v] : trace.touched) touched.push_back({u, v});
    j["touched"] = std::move(touched);

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << j.dump(1) << '\n';
    if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace lwp
