#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwp/sea.hpp"

namespace lwp {

enum class AttackMode { global, local };

AttackMode attack_mode_from_string(const std::string& name);
std::string to_string(AttackMode mode);

/// Per-link perturbation magnitude. gradient_scaled moves a weight by
/// eta * |gradient| in the gradient's direction; fixed moves it by a constant
/// epsilon in the gradient's direction.
struct StepRule {
    enum class Kind { gradient_scaled, fixed };
    Kind kind = Kind::gradient_scaled;
    double value = 2000.0;

    static StepRule gradient_scaled(double eta) { return {Kind::gradient_scaled, eta}; }
    static StepRule fixed(double epsilon) { return {Kind::fixed, epsilon}; }
    void validate() const;
};

struct AttackConfig {
    AttackMode mode = AttackMode::global;
    int iterations = 1;
    int per_iteration = 1;
    /// Cap on distinct modified links; defaults to iterations * per_iteration.
    std::optional<int> budget;
    StepRule step_rule{};
    double clamp_lo = 1e-6;
    double clamp_hi = 1.0 - 1e-6;
    /// Forbids touching the same link in more than one iteration.
    bool distinct_only = false;
    std::uint64_t seed = 0;

    int resolved_budget() const;
    void validate() const;
};

/// A link under attack: endpoints plus its true normalized weight.
struct Target {
    int u = 0;
    int v = 0;
    double true_weight = 0.0;
};

/// Budget anchor: sum of the endpoints' degrees in the observed graph.
int degree_sum(const WeightedGraph& observed, int u, int v);

/// Targets sampled without replacement from a split's withheld links.
struct TargetSpec {
    std::vector<Target> targets;
    std::vector<int> degree_sums;

    static TargetSpec sample(const ObservedSplit& split, int count, std::uint64_t seed);
};

/// Statically admissible links for one attack: observed links passing the
/// mode's incidence rule, never including the target pair itself.
class LinkMask {
public:
    static LinkMask build(AttackMode mode, const WeightedGraph& observed, const Target& target);

    bool admits(int u, int v) const;
    const std::vector<std::pair<int, int>>& links() const { return links_; }
    int admitted_count() const { return static_cast<int>(links_.size()); }

private:
    int node_count_ = 0;
    std::vector<char> dense_;
    std::vector<std::pair<int, int>> links_;
};

/// Mean of the two directed entries, kept in the upper triangle (zero on and
/// below the diagonal).
Eigen::MatrixXd symmetrize_gradient(const Eigen::MatrixXd& g);

/// Squared error between the true normalized weight and the current
/// prediction for the target link.
double target_loss(const SeaContext& ctx, const SeaParams& params, const SeaConfig& sea_cfg,
                   const Target& target);

enum class SkipReason { zero_gradient, saturated, budget_spent, already_touched };
std::string to_string(SkipReason reason);

struct AttackSkip {
    int iteration = 0;
    int u = 0;
    int v = 0;
    SkipReason reason = SkipReason::zero_gradient;
};

/// One iteration's selection: signed raw steps in a symmetric delta matrix,
/// plus which candidates were taken and which were passed over.
struct PerturbationMatrix {
    Eigen::MatrixXd delta;
    std::vector<std::pair<int, int>> selected;
    std::vector<AttackSkip> skipped;
    /// Fewer than the requested number of links could be selected.
    bool exhausted = false;
};

/// Picks the per_iteration admissible links with the largest |symmetrized
/// gradient| (ties broken by lowest (u,v)) and assigns each its signed step.
/// Admissible means: present link, mask admits it, nonzero gradient entry,
/// the clamped step actually moves the weight, and the distinct-link budget
/// in `touched` allows it.
PerturbationMatrix perturbation_step(const SeaContext& state, const Eigen::MatrixXd& sym_grad,
                                     const AttackConfig& cfg, const LinkMask& mask,
                                     const std::vector<std::pair<int, int>>& touched);

struct AttackStep {
    int iteration = 0;
    int u = 0;
    int v = 0;
    /// Applied weight change after clamping.
    double step = 0.0;
    double loss_after = 0.0;
};

struct AttackTrace {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int iterations_run = 0;
    bool budget_exhausted = false;
    std::vector<AttackStep> steps;
    std::vector<AttackSkip> skips;
    std::vector<std::pair<int, int>> touched;  // distinct links, sorted
};

struct AttackOutcome {
    WeightedGraph adversarial;
    AttackTrace trace;
};

/// Iterative gradient attack on one target link: recompute the target-loss
/// weight gradient on the evolving graph, symmetrize it, perturb the
/// top-gradient admissible links, clamp, repeat. The adjacency pattern never
/// changes; only weights of existing links move.
AttackOutcome run_iga_lwp(const WeightedGraph& observed, const SeaParams& params,
                          const SeaConfig& sea_cfg, const Target& target, const AttackConfig& cfg);

void save_attack_trace(const AttackTrace& trace, const std::string& path);

}  // namespace lwp
