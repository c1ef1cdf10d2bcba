#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "lwp/attack.hpp"

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

// A target pair that is not an observed link, so it mimics a withheld link.
Target absent_target(const WeightedGraph& g, double truth, std::uint64_t seed) {
    Rng rng(seed);
    for (;;) {
        const int u = static_cast<int>(rng.index(static_cast<std::size_t>(g.node_count())));
        const int v = static_cast<int>(rng.index(static_cast<std::size_t>(g.node_count())));
        if (u != v && !g.has_edge(u, v)) return {std::min(u, v), std::max(u, v), truth};
    }
}

}  // namespace

TEST_CASE("gradient symmetrization keeps the upper-triangular mean") {
    Eigen::MatrixXd g(2, 2);
    g << 0, 2, 4, 0;
    const auto s = symmetrize_gradient(g);
    CHECK(s(0, 1) == 3.0);
    CHECK(s(1, 0) == 0.0);
    CHECK(s(0, 0) == 0.0);
    CHECK(s(1, 1) == 0.0);

    Eigen::MatrixXd sym(3, 3);
    sym << 0, 1, 2, 1, 0, 5, 2, 5, 0;
    const auto s2 = symmetrize_gradient(sym);
    CHECK(s2(0, 1) == 1.0);
    CHECK(s2(0, 2) == 2.0);
    CHECK(s2(1, 2) == 5.0);
    CHECK(s2(1, 0) == 0.0);

    Eigen::MatrixXd anti(3, 3);
    anti << 0, 7, -2, -7, 0, 3, 2, -3, 0;
    CHECK(symmetrize_gradient(anti).norm() == 0.0);

    // Idempotence through the symmetric completion.
    Eigen::MatrixXd r = Eigen::MatrixXd::Random(5, 5);
    const auto once = symmetrize_gradient(r);
    const Eigen::MatrixXd completed = once + once.transpose();
    CHECK((symmetrize_gradient(completed) - once).norm() == 0.0);

    CHECK_THROWS_AS(symmetrize_gradient(Eigen::MatrixXd::Zero(2, 3)), ValidationError);
}

TEST_CASE("target loss is the squared gap to the true weight") {
    const auto g = random_graph(10, 0.3, 5);
    const auto cfg = small_config(5);
    auto p = init_sea_params(10, cfg);
    SeaContext ctx(g);

    // Zero decoder forces prediction 0.5 everywhere.
    p.decoder_vector.setZero();
    CHECK(target_loss(ctx, p, cfg, {0, 5, 1.0}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(target_loss(ctx, p, cfg, {0, 5, 0.5}) == doctest::Approx(0.0).epsilon(1e-15));

    // Strictly monotone in the gap.
    const double near = target_loss(ctx, p, cfg, {0, 5, 0.6});
    const double far = target_loss(ctx, p, cfg, {0, 5, 0.9});
    CHECK(far > near);
}

TEST_CASE("masks admit the right links") {
    // Star centered at 0 plus one extra link (3,4).
    const auto g = WeightedGraph::from_edges(
        6, {{0, 1, 0.2}, {0, 2, 0.3}, {0, 3, 0.4}, {0, 4, 0.5}, {0, 5, 0.6}, {3, 4, 0.7}});
    const Target t{0, 1, 0.5};

    const auto local = LinkMask::build(AttackMode::local, g, t);
    CHECK(local.admitted_count() == 4);  // all star edges except the target; (3,4) excluded
    CHECK(local.admits(0, 2));
    CHECK(local.admits(0, 5));
    CHECK_FALSE(local.admits(0, 1));
    CHECK_FALSE(local.admits(1, 0));
    CHECK_FALSE(local.admits(3, 4));

    const auto global = LinkMask::build(AttackMode::global, g, t);
    CHECK(global.admitted_count() == g.edge_count() - 1);  // target present here
    CHECK(global.admits(3, 4));
    CHECK_FALSE(global.admits(0, 1));

    // Target absent from the graph: global admits every link.
    const Target absent{1, 2, 0.5};
    CHECK(LinkMask::build(AttackMode::global, g, absent).admitted_count() == g.edge_count());

    // Local mask never admits a link disjoint from the target endpoints.
    const auto local2 = LinkMask::build(AttackMode::local, g, {1, 2, 0.5});
    CHECK_FALSE(local2.admits(3, 4));
    CHECK_FALSE(local2.admits(0, 3));
    CHECK(local2.admits(0, 1));
    CHECK(local2.admits(0, 2));
}

TEST_CASE("perturbation step picks the largest admissible gradient entry") {
    const auto g = WeightedGraph::from_edges(8, {{0, 1, 0.5}, {2, 5, 0.5}, {3, 6, 0.5}});
    SeaContext ctx(g);
    const Target t{0, 7, 0.5};
    const auto mask = LinkMask::build(AttackMode::global, g, t);

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(8, 8);
    grad(2, 5) = 0.4;   // unique max among links
    grad(3, 6) = -0.1;
    grad(0, 1) = 0.05;
    grad(4, 7) = 9.0;   // absent pair, must be ignored

    AttackConfig cfg;
    cfg.step_rule = StepRule::gradient_scaled(2.0);
    const auto p = perturbation_step(ctx, grad, cfg, mask, {});
    REQUIRE(p.selected.size() == 1);
    CHECK(p.selected[0] == std::make_pair(2, 5));
    CHECK(p.delta(2, 5) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p.delta(5, 2) == p.delta(2, 5));
    CHECK(p.delta.cwiseAbs().sum() == doctest::Approx(1.6).epsilon(1e-15));
    CHECK_FALSE(p.exhausted);

    // Negative gradient moves the weight down under the fixed rule.
    AttackConfig fixed_cfg;
    fixed_cfg.step_rule = StepRule::fixed(0.07);
    fixed_cfg.per_iteration = 2;
    const auto p2 = perturbation_step(ctx, grad, fixed_cfg, mask, {});
    REQUIRE(p2.selected.size() == 2);
    CHECK(p2.selected[0] == std::make_pair(2, 5));
    CHECK(p2.selected[1] == std::make_pair(3, 6));
    CHECK(p2.delta(2, 5) == 0.07);
    CHECK(p2.delta(3, 6) == -0.07);
}

TEST_CASE("perturbation step honors budget, re-selection, and saturation rules") {
    const auto g = WeightedGraph::from_edges(4, {{0, 1, 0.5}, {2, 3, 0.5}});
    SeaContext ctx(g);
    const Target t{0, 3, 0.5};
    const auto mask = LinkMask::build(AttackMode::global, g, t);

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(4, 4);
    grad(0, 1) = 1.0;
    grad(2, 3) = 0.5;

    AttackConfig cfg;
    cfg.step_rule = StepRule::fixed(0.1);
    cfg.budget = 1;

    // Budget already consumed by a different link: only that link is admissible.
    const auto p = perturbation_step(ctx, grad, cfg, mask, {{2, 3}});
    REQUIRE(p.selected.size() == 1);
    CHECK(p.selected[0] == std::make_pair(2, 3));
    REQUIRE(p.skipped.size() == 1);
    CHECK(p.skipped[0].u == 0);
    CHECK(p.skipped[0].reason == SkipReason::budget_spent);

    // distinct_only forbids revisiting 2-3; with budget left, 0-1 is chosen.
    auto cfg2 = cfg;
    cfg2.budget = 2;
    cfg2.distinct_only = true;
    const auto p2 = perturbation_step(ctx, grad, cfg2, mask, {{2, 3}});
    REQUIRE(p2.selected.size() == 1);
    CHECK(p2.selected[0] == std::make_pair(0, 1));

    // Saturated link at the upper clamp cannot move further up.
    ctx.set_weight(0, 1, 1.0 - 1e-6);
    AttackConfig fixed_step;
    fixed_step.step_rule = StepRule::fixed(0.1);
    const auto p3 = perturbation_step(ctx, grad, fixed_step, mask, {});
    REQUIRE(p3.selected.size() == 1);
    CHECK(p3.selected[0] == std::make_pair(2, 3));
    REQUIRE_FALSE(p3.skipped.empty());
    CHECK(p3.skipped[0].reason == SkipReason::saturated);

    // But it can still move down.
    Eigen::MatrixXd down = Eigen::MatrixXd::Zero(4, 4);
    down(0, 1) = -1.0;
    const auto p4 = perturbation_step(ctx, down, fixed_step, mask, {});
    REQUIRE(p4.selected.size() == 1);
    CHECK(p4.selected[0] == std::make_pair(0, 1));
    CHECK(p4.delta(0, 1) == -0.1);

    // Zero gradient entries are never selected.
    Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(4, 4);
    const auto p5 = perturbation_step(ctx, zeros, fixed_step, mask, {});
    CHECK(p5.selected.empty());
    CHECK(p5.exhausted);
}

TEST_CASE("zero eta produces a zero perturbation") {
    const auto g = random_graph(10, 0.3, 3);
    const auto cfg_sea = small_config(3);
    const auto params = init_sea_params(10, cfg_sea);
    const Target t = absent_target(g, 0.8, 17);

    AttackConfig cfg;
    cfg.step_rule = StepRule::gradient_scaled(0.0);
    cfg.iterations = 3;
    const auto out = run_iga_lwp(g, params, cfg_sea, t, cfg);
    CHECK((out.adversarial.weights() - g.weights()).norm() == 0.0);
}

TEST_CASE("zero iterations return the observed graph untouched") {
    const auto g = random_graph(12, 0.3, 9);
    const auto cfg_sea = small_config(9);
    const auto params = init_sea_params(12, cfg_sea);
    const Target t = absent_target(g, 0.7, 4);

    AttackConfig cfg;
    cfg.iterations = 0;
    const auto out = run_iga_lwp(g, params, cfg_sea, t, cfg);
    CHECK((out.adversarial.weights() - g.weights()).norm() == 0.0);
    CHECK((out.adversarial.adjacency() - g.adjacency()).norm() == 0.0);
    CHECK(out.trace.steps.empty());
    CHECK(out.trace.initial_loss == out.trace.final_loss);
}

TEST_CASE("attack raises the target loss on most random instances") {
    int raised = 0;
    const int trials = 50;
    for (int trial = 0; trial < trials; ++trial) {
        const auto seed = static_cast<std::uint64_t>(trial + 1);
        const auto g = random_graph(20, 0.15, seed);
        const auto cfg_sea = small_config(seed + 500);
        const auto params = init_sea_params(20, cfg_sea);
        const Target t = absent_target(g, trial % 2 == 0 ? 0.85 : 0.2, seed + 900);

        AttackConfig cfg;
        cfg.iterations = 5;
        cfg.step_rule = StepRule::gradient_scaled(50.0);
        const auto out = run_iga_lwp(g, params, cfg_sea, t, cfg);
        if (out.trace.final_loss >= out.trace.initial_loss - 1e-12) ++raised;
    }
    CHECK(raised >= 45);
}

TEST_CASE("attack invariants hold along the trace") {
    for (const auto mode : {AttackMode::global, AttackMode::local}) {
        const auto g = random_graph(16, 0.25, 31);
        const auto cfg_sea = small_config(32);
        const auto params = init_sea_params(16, cfg_sea);
        const Target t = absent_target(g, 0.9, 33);

        AttackConfig cfg;
        cfg.mode = mode;
        cfg.iterations = 8;
        cfg.step_rule = StepRule::gradient_scaled(40.0);
        const auto out = run_iga_lwp(g, params, cfg_sea, t, cfg);

        // Adjacency is untouched.
        CHECK((out.adversarial.adjacency() - g.adjacency()).norm() == 0.0);
        CHECK(out.adversarial.edge_count() == g.edge_count());

        // Distinct touched links stay within budget.
        CHECK(static_cast<int>(out.trace.touched.size()) <= cfg.resolved_budget());

        std::set<std::pair<int, int>> touched(out.trace.touched.begin(), out.trace.touched.end());
        for (const Edge& e : out.adversarial.edges()) {
            const double before = g.weight(e.u, e.v);
            if (touched.count({e.u, e.v}) == 0) {
                CHECK(e.w == before);  // untouched weights are bit-identical
            } else {
                CHECK(e.w >= cfg.clamp_lo);
                CHECK(e.w <= cfg.clamp_hi);
            }
        }
        for (const auto& [u, v] : out.trace.touched) {
            CHECK(g.has_edge(u, v));
            CHECK(std::make_pair(u, v) != std::make_pair(t.u, t.v));
            if (mode == AttackMode::local) {
                CHECK((u == t.u || u == t.v || v == t.u || v == t.v));
            }
        }
        // Steps reference real iterations and the final loss matches the last step.
        if (!out.trace.steps.empty()) {
            CHECK(out.trace.steps.back().loss_after == out.trace.final_loss);
        }
    }
}

TEST_CASE("attack is deterministic") {
    const auto g = random_graph(14, 0.3, 77);
    const auto cfg_sea = small_config(78);
    const auto params = init_sea_params(14, cfg_sea);
    const Target t = absent_target(g, 0.75, 79);

    AttackConfig cfg;
    cfg.iterations = 6;
    cfg.step_rule = StepRule::gradient_scaled(30.0);

    const auto a = run_iga_lwp(g, params, cfg_sea, t, cfg);
    const auto b = run_iga_lwp(g, params, cfg_sea, t, cfg);
    CHECK((a.adversarial.weights() - b.adversarial.weights()).norm() == 0.0);
    CHECK(a.trace.steps.size() == b.trace.steps.size());
    CHECK(a.trace.final_loss == b.trace.final_loss);
}

TEST_CASE("distinct-only budget exhausts and signals instead of crashing") {
    const auto g = WeightedGraph::from_edges(4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}});
    const auto cfg_sea = small_config(40);
    const auto params = init_sea_params(4, cfg_sea);
    const Target t{0, 3, 0.9};

    AttackConfig cfg;
    cfg.iterations = 10;
    cfg.budget = 1;
    cfg.distinct_only = true;
    cfg.step_rule = StepRule::fixed(0.01);
    const auto out = run_iga_lwp(g, params, cfg_sea, t, cfg);
    CHECK(out.trace.touched.size() <= 1);
    CHECK(out.trace.budget_exhausted);

    // Re-selection allowed: the single budgeted link keeps moving.
    auto cfg2 = cfg;
    cfg2.distinct_only = false;
    const auto out2 = run_iga_lwp(g, params, cfg_sea, t, cfg2);
    CHECK(out2.trace.touched.size() <= 1);
    CHECK(out2.trace.steps.size() >= out.trace.steps.size());
}

TEST_CASE("attack config validation") {
    AttackConfig cfg;
    cfg.iterations = -1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = AttackConfig{};
    cfg.per_iteration = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = AttackConfig{};
    cfg.budget = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = AttackConfig{};
    cfg.clamp_lo = 0.5;
    cfg.clamp_hi = 0.4;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = AttackConfig{};
    cfg.step_rule.value = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK_NOTHROW(AttackConfig{}.validate());

    AttackConfig defaulted;
    defaulted.iterations = 7;
    defaulted.per_iteration = 2;
    CHECK(defaulted.resolved_budget() == 14);
    defaulted.budget = 3;
    CHECK(defaulted.resolved_budget() == 3);

    CHECK(attack_mode_from_string("global") == AttackMode::global);
    CHECK(attack_mode_from_string("local") == AttackMode::local);
    CHECK_THROWS_AS(attack_mode_from_string("both"), ValidationError);
}

TEST_CASE("target sampling draws from the withheld links deterministically") {
    const auto g = random_graph(30, 0.25, 8);
    const auto split = split_train_test(g, 0.2, 4);
    REQUIRE(split.test_edges.size() >= 10);

    const auto spec = TargetSpec::sample(split, 6, 11);
    REQUIRE(spec.targets.size() == 6);
    REQUIRE(spec.degree_sums.size() == 6);

    std::set<std::pair<int, int>> withheld;
    for (const Edge& e : split.test_edges) withheld.insert({e.u, e.v});
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < spec.targets.size(); ++i) {
        const auto& t = spec.targets[i];
        CHECK(withheld.count({t.u, t.v}) == 1);
        CHECK(seen.insert({t.u, t.v}).second);  // no repeats
        CHECK(spec.degree_sums[i] == split.observed.degree(t.u) + split.observed.degree(t.v));
        CHECK_FALSE(split.observed.has_edge(t.u, t.v));
    }

    const auto again = TargetSpec::sample(split, 6, 11);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(again.targets[i].u == spec.targets[i].u);
        CHECK(again.targets[i].v == spec.targets[i].v);
    }
    const auto different = TargetSpec::sample(split, 6, 12);
    bool any_diff = false;
    for (std::size_t i = 0; i < 6; ++i) {
        if (different.targets[i].u != spec.targets[i].u || different.targets[i].v != spec.targets[i].v) {
            any_diff = true;
        }
    }
    CHECK(any_diff);

    CHECK_THROWS_AS(TargetSpec::sample(split, 0, 1), ValidationError);
    CHECK_THROWS_AS(TargetSpec::sample(split, static_cast<int>(split.test_edges.size()) + 1, 1),
                    ValidationError);
}

TEST_CASE("attack trace can be exported as JSON") {
    const auto g = random_graph(10, 0.3, 5);
    const auto cfg_sea = small_config(6);
    const auto params = init_sea_params(10, cfg_sea);
    const Target t = absent_target(g, 0.8, 7);

    AttackConfig cfg;
    cfg.iterations = 3;
    cfg.step_rule = StepRule::gradient_scaled(20.0);
    const auto out = run_iga_lwp(g, params, cfg_sea, t, cfg);

    const auto path = (std::filesystem::temp_directory_path() / "lwp_trace.json").string();
    save_attack_trace(out.trace, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::remove(path.c_str());
    CHECK(text.find("initial_loss") != std::string::npos);
    CHECK(text.find("final_loss") != std::string::npos);
    CHECK(text.find("touched") != std::string::npos);
}
