#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lwp/attack.hpp"

namespace lwp {

enum class DirectionRule { random_sign, increase, decrease };

DirectionRule direction_rule_from_string(const std::string& name);
std::string to_string(DirectionRule rule);

struct BaselineConfig {
    /// Relative perturbation size: each selected link moves by alpha * w.
    double alpha = 0.2;
    int budget = 1;
    AttackMode mode = AttackMode::global;
    DirectionRule direction_rule = DirectionRule::random_sign;
    std::uint64_t seed = 0;
    double clamp_lo = 1e-6;
    double clamp_hi = 1.0 - 1e-6;

    void validate() const;
};

struct BaselineOutcome {
    WeightedGraph adversarial;
    std::vector<std::pair<int, int>> touched;  // sorted distinct links
    /// Links the budget asked for beyond what the mask admits.
    int shortfall = 0;
};

/// Random perturbation baseline: samples `budget` admissible links uniformly
/// without replacement and moves each by alpha * w in the configured
/// direction, clamped into (clamp_lo, clamp_hi).
BaselineOutcome rda_attack(const WeightedGraph& observed, const Target& target,
                           const BaselineConfig& cfg);

/// Similarity baseline: perturbs the admissible links whose endpoints share
/// the most common neighbors (ties by lowest (u,v)). Selection depends only
/// on topology, never on weights.
BaselineOutcome sacn_attack(const WeightedGraph& observed, const Target& target,
                            const BaselineConfig& cfg);

}  // namespace lwp
