#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lwp/graph.hpp"

namespace lwp {

/// Seeded generator for weighted benchmark graphs. Topology grows by
/// preferential attachment with triadic closure; weights are monotone in a
/// structural score (common neighbors plus node mass) with noise, then
/// rank-mapped onto [weight_lo, weight_hi] with a skew toward the low end.
struct SynthConfig {
    int nodes = 300;
    int edges = 1800;
    double weight_lo = 1.0;
    double weight_hi = 50.0;
    double weight_shape = 2.0;  // >1 skews weights toward weight_lo
    double cn_weight = 1.0;     // contribution of common-neighbor count to the score
    double mass_sigma = 0.6;    // spread of per-node log mass
    double noise_sigma = 0.35;  // score jitter
    double closure = 0.35;      // probability a new link closes a triangle
    std::uint64_t seed = 1;

    void validate() const;
};

WeightedGraph make_synthetic(const SynthConfig& cfg);

/// Named presets sized like common weighted benchmarks (ucnet is reduced to
/// stay tractable for dense single-core experiments).
SynthConfig synth_preset(const std::string& name);

std::vector<std::string> synth_preset_names();

}  // namespace lwp
