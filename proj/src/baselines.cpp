#include "lwp/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace lwp {

DirectionRule direction_rule_from_string(const std::string& name) {
    if (name == "random_sign") return DirectionRule::random_sign;
    if (name == "increase") return DirectionRule::increase;
    if (name == "decrease") return DirectionRule::decrease;
    throw ValidationError("unknown direction rule '" + name +
                          "' (expected random_sign, increase, or decrease)");
}

std::string to_string(DirectionRule rule) {
    switch (rule) {
        case DirectionRule::random_sign: return "random_sign";
        case DirectionRule::increase: return "increase";
        case DirectionRule::decrease: return "decrease";
    }
    return "unknown";
}

void BaselineConfig::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("baseline: alpha must be finite and non-negative");
    }
    if (budget < 1) throw ValidationError("baseline: budget must be >= 1");
    if (!(clamp_lo >= 0.0 && clamp_lo < clamp_hi && clamp_hi <= 1.0)) {
        throw ValidationError("baseline: clamp bounds must satisfy 0 <= lo < hi <= 1");
    }
}

namespace {

BaselineOutcome apply_selection(const WeightedGraph& observed,
                                const std::vector<std::pair<int, int>>& selection,
                                const BaselineConfig& cfg, Rng& rng, int admitted) {
    Eigen::MatrixXd weights = observed.weights();
    for (const auto& [u, v] : selection) {
        double sign = 1.0;
        switch (cfg.direction_rule) {
            case DirectionRule::random_sign: sign = rng.coin() ? 1.0 : -1.0; break;
            case DirectionRule::increase: sign = 1.0; break;
            case DirectionRule::decrease: sign = -1.0; break;
        }
        const double w = weights(u, v);
        const double delta = sign * cfg.alpha * w;
        // A zero delta must not re-clamp a weight that sits outside the window.
        const double moved = delta == 0.0 ? w : std::clamp(w + delta, cfg.clamp_lo, cfg.clamp_hi);
        weights(u, v) = moved;
        weights(v, u) = moved;
    }

    BaselineOutcome out;
    out.adversarial = WeightedGraph::from_matrices(observed.adjacency(), std::move(weights));
    out.touched = selection;
    std::sort(out.touched.begin(), out.touched.end());
    out.shortfall = std::max(0, cfg.budget - admitted);
    return out;
}

}  // namespace

BaselineOutcome rda_attack(const WeightedGraph& observed, const Target& target,
                           const BaselineConfig& cfg) {
    cfg.validate();
    const LinkMask mask = LinkMask::build(cfg.mode, observed, target);
    auto pool = mask.links();
    const int take = std::min<int>(cfg.budget, static_cast<int>(pool.size()));

    Rng rng(cfg.seed);
    for (int i = 0; i < take; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) + rng.index(pool.size() - static_cast<std::size_t>(i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(take));
    return apply_selection(observed, pool, cfg, rng, mask.admitted_count());
}

BaselineOutcome sacn_attack(const WeightedGraph& observed, const Target& target,
                            const BaselineConfig& cfg) {
    cfg.validate();
    const LinkMask mask = LinkMask::build(cfg.mode, observed, target);

    struct Ranked {
        int cn;
        int u, v;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(mask.links().size());
    for (const auto& [u, v] : mask.links()) ranked.push_back({common_neighbors(observed, u, v), u, v});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.cn != b.cn) return a.cn > b.cn;
        return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
    });

    const int take = std::min<int>(cfg.budget, static_cast<int>(ranked.size()));
    std::vector<std::pair<int, int>> selection;
    selection.reserve(static_cast<std::size_t>(take));
    for (int i = 0; i < take; ++i) selection.emplace_back(ranked[static_cast<std::size_t>(i)].u,
                                                          ranked[static_cast<std::size_t>(i)].v);

    Rng rng(cfg.seed);
    return apply_selection(observed, selection, cfg, rng, mask.admitted_count());
}

}  // namespace lwp
