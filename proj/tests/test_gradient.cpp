#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lwp/sea.hpp"
#include "reference_sea.hpp"

using namespace lwp;

namespace {

WeightedGraph random_graph(int nodes, double extra_edge_prob, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> present;
    for (int u = 0; u + 1 < nodes; ++u) {
        edges.push_back({u, u + 1, 0.1 + 0.8 * rng.unit()});
        present.insert({u, u + 1});
    }
    for (int u = 0; u < nodes; ++u) {
        for (int v = u + 1; v < nodes; ++v) {
            if (present.count({u, v}) == 0 && rng.unit() < extra_edge_prob) {
                edges.push_back({u, v, 0.1 + 0.8 * rng.unit()});
                present.insert({u, v});
            }
        }
    }
    return WeightedGraph::from_edges(nodes, std::move(edges));
}

SeaConfig small_config(std::uint64_t seed) {
    SeaConfig cfg;
    cfg.hidden_dim = 8;
    cfg.embed_dim = 6;
    cfg.seed = seed;
    return cfg;
}

constexpr long double kStep = 1e-5L;

// Relative error check with an absolute floor for near-zero gradients.
void check_grad(double analytic, long double fd, const std::string& label) {
    const double fdd = static_cast<double>(fd);
    INFO(label, ": analytic=", analytic, " fd=", fdd);
    if (std::abs(analytic) > 1e-8 || std::abs(fdd) > 1e-8) {
        const double denom = std::max(std::abs(analytic), std::abs(fdd));
        CHECK(std::abs(analytic - fdd) / denom < 1e-4);
    } else {
        CHECK(std::abs(analytic - fdd) < 1e-8);
    }
}

long double fd_weight(ref::Model& model, const WeightLossSpec& spec, int i, int j) {
    const long double base = model.feature(i, j);
    model.set_feature(i, j, base + kStep);
    const long double up = model.loss(spec);
    model.set_feature(i, j, base - kStep);
    const long double down = model.loss(spec);
    model.set_feature(i, j, base);
    return (up - down) / (2.0L * kStep);
}

long double fd_param(ref::Model& model, const WeightLossSpec& spec, int flat) {
    const long double base = model.get_param(flat);
    model.set_param(flat, base + kStep);
    const long double up = model.loss(spec);
    model.set_param(flat, base - kStep);
    const long double down = model.loss(spec);
    model.set_param(flat, base);
    return (up - down) / (2.0L * kStep);
}

}  // namespace

TEST_CASE("engine loss matches the long double reference closely") {
    for (std::uint64_t seed : {2ull, 7ull, 19ull, 23ull, 101ull}) {
        const auto g = random_graph(12, 0.25, seed);
        const auto cfg = small_config(seed + 1);
        const auto p = init_sea_params(12, cfg);
        SeaContext ctx(g);
        const auto spec = WeightLossSpec::training(g, 0.4, 1e-4);
        const ref::Model model(ctx, p, cfg);
        const auto engine = sea_loss(ctx, p, cfg, spec);
        const auto reference = static_cast<double>(model.loss(spec));
        CHECK(engine == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("weight gradients match finite differences for the training loss") {
    for (std::uint64_t seed : {1ull, 5ull, 11ull, 17ull, 29ull}) {
        CAPTURE(seed);
        const auto g = random_graph(12, 0.2, seed);
        const auto cfg = small_config(seed + 50);
        const auto p = init_sea_params(12, cfg);
        SeaContext ctx(g);
        const auto spec = WeightLossSpec::training(g, 0.3, 1e-4);

        const auto grads = sea_gradient(ctx, p, cfg, spec, false, true);
        ref::Model model(ctx, p, cfg);

        // Every present link in both orientations, plus a few absent pairs.
        std::vector<std::pair<int, int>> entries;
        for (const Edge& e : g.edges()) {
            entries.emplace_back(e.u, e.v);
            entries.emplace_back(e.v, e.u);
        }
        Rng rng(seed + 1000);
        while (entries.size() < g.edges().size() * 2 + 10) {
            const int i = static_cast<int>(rng.index(12));
            const int j = static_cast<int>(rng.index(12));
            if (i != j) entries.emplace_back(i, j);
        }

        for (const auto& [i, j] : entries) {
            const auto fd = fd_weight(model, spec, i, j);
            check_grad(grads.d_weights(i, j),
                       fd, "w(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
}

TEST_CASE("weight gradients match finite differences for a single target link") {
    for (std::uint64_t seed : {3ull, 13ull, 31ull, 47ull, 71ull}) {
        CAPTURE(seed);
        const auto g = random_graph(14, 0.2, seed);
        const auto cfg = small_config(seed + 9);
        const auto p = init_sea_params(14, cfg);
        SeaContext ctx(g);
        const int u = static_cast<int>(seed % 7);
        const int v = u + 4;
        const auto spec = WeightLossSpec::target(u, v, 0.45);

        const auto grads = sea_gradient(ctx, p, cfg, spec, false, true);
        ref::Model model(ctx, p, cfg);

        for (int i = 0; i < 14; ++i) {
            for (int j = 0; j < 14; ++j) {
                if (i == j) continue;
                const auto fd = fd_weight(model, spec, i, j);
                check_grad(grads.d_weights(i, j),
                           fd, "w(" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

TEST_CASE("parameter gradients match finite differences") {
    for (std::uint64_t seed : {4ull, 9ull, 21ull, 37ull, 55ull}) {
        CAPTURE(seed);
        const auto g = random_graph(11, 0.25, seed);
        const auto cfg = small_config(seed + 3);
        const auto p = init_sea_params(11, cfg);
        SeaContext ctx(g);
        const auto spec = WeightLossSpec::training(g, 0.25, 1e-4);

        const auto grads = sea_gradient(ctx, p, cfg, spec, true, false);
        ref::Model model(ctx, p, cfg);
        const int feat = 2 * 11;
        const int total = model.param_count();

        // A deterministic sample across all five blocks.
        Rng rng(seed + 2000);
        std::set<int> flats;
        while (flats.size() < 60) flats.insert(static_cast<int>(rng.index(static_cast<std::size_t>(total))));
        // Force coverage of the small vector blocks.
        const int affine = cfg.hidden_dim * feat;
        flats.insert(2 * affine);                        // first bias entry
        flats.insert(2 * affine + cfg.hidden_dim);       // first gamma entry
        flats.insert(total - 1);                         // last decoder entry
        flats.insert(total - cfg.embed_dim);             // first decoder entry

        for (const int flat : flats) {
            const auto fd = fd_param(model, spec, flat);
            check_grad(ref::param_grad_at(grads.d_params, feat, flat), fd,
                       "p[" + std::to_string(flat) + "]");
        }
    }
}

TEST_CASE("parameter gradients match finite differences for a target loss") {
    const auto g = random_graph(12, 0.25, 81);
    const auto cfg = small_config(90);
    const auto p = init_sea_params(12, cfg);
    SeaContext ctx(g);
    const auto spec = WeightLossSpec::target(2, 9, 0.6);

    const auto grads = sea_gradient(ctx, p, cfg, spec, true, false);
    ref::Model model(ctx, p, cfg);
    const int feat = 2 * 12;
    const int total = model.param_count();

    Rng rng(4242);
    std::set<int> flats;
    while (flats.size() < 80) flats.insert(static_cast<int>(rng.index(static_cast<std::size_t>(total))));
    for (const int flat : flats) {
        const auto fd = fd_param(model, spec, flat);
        check_grad(ref::param_grad_at(grads.d_params, feat, flat), fd,
                   "p[" + std::to_string(flat) + "]");
    }
}

TEST_CASE("gradients respect the symmetry penalty") {
    // With a large nu the sym terms dominate; FD still has to agree.
    const auto g = random_graph(10, 0.3, 61);
    const auto cfg = small_config(62);
    const auto p = init_sea_params(10, cfg);
    SeaContext ctx(g);
    const auto spec = WeightLossSpec::training(g, 5.0, 0.0);

    const auto grads = sea_gradient(ctx, p, cfg, spec, true, true);
    ref::Model model(ctx, p, cfg);

    for (const Edge& e : g.edges()) {
        check_grad(grads.d_weights(e.u, e.v), fd_weight(model, spec, e.u, e.v),
                   "w(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    const int feat = 2 * 10;
    Rng rng(777);
    std::set<int> flats;
    while (flats.size() < 40) {
        flats.insert(static_cast<int>(rng.index(static_cast<std::size_t>(model.param_count()))));
    }
    for (const int flat : flats) {
        check_grad(ref::param_grad_at(grads.d_params, feat, flat), fd_param(model, spec, flat),
                   "p[" + std::to_string(flat) + "]");
    }
}

TEST_CASE("target loss produces a usable nonzero weight gradient") {
    const auto g = random_graph(10, 0.3, 91);
    const auto cfg = small_config(92);
    const auto p = init_sea_params(10, cfg);
    SeaContext ctx(g);
    const auto grads = sea_gradient(ctx, p, cfg, WeightLossSpec::target(0, 5, 0.5), false, true);
    CHECK(grads.d_weights.norm() > 0.0);
    CHECK(grads.d_weights.allFinite());
}
