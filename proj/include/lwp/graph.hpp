#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lwp/common.hpp"

namespace lwp {

/// Hard cap on dense matrix storage; larger inputs are rejected.
inline constexpr int kMaxNodes = 4096;

struct Edge {
    int u = 0;
    int v = 0;
    double w = 0.0;
};

/// Undirected weighted graph with aligned dense adjacency and weight
/// matrices. Immutable after construction; safe to share across threads.
///
/// Invariants (enforced by the factories):
///   - adjacency and weights are symmetric with zero diagonal
///   - a_uv = 1  <=>  w_uv > 0
///   - edge list holds each link once with u < v, sorted lexicographically
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// Builds a graph from an explicit edge list. Node ids must lie in
    /// [0, node_count); duplicate or self-loop edges are rejected.
    static WeightedGraph from_edges(int node_count, std::vector<Edge> edges);

    /// Builds a graph from symmetric adjacency/weight matrices (validated).
    static WeightedGraph from_matrices(Eigen::MatrixXd adjacency, Eigen::MatrixXd weights);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const Eigen::MatrixXd& adjacency() const { return adjacency_; }
    const Eigen::MatrixXd& weights() const { return weights_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }

    int degree(int u) const { return static_cast<int>(neighbors_[static_cast<std::size_t>(u)].size()); }
    bool has_edge(int u, int v) const { return adjacency_(u, v) != 0.0; }
    double weight(int u, int v) const { return weights_(u, v); }

    double min_weight() const;
    double max_weight() const;

    void check_node(int u) const;

private:
    int node_count_ = 0;
    Eigen::MatrixXd adjacency_;
    Eigen::MatrixXd weights_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> neighbors_;

    void finish_from_edges();
};

enum class EdgeListFormat { whitespace, csv };

struct LoadResult {
    WeightedGraph graph;
    int self_loops_dropped = 0;
    int duplicates_aggregated = 0;
};

/// Reads a `u v w` edge list (one record per line, `#` comments ignored).
/// Node ids are re-indexed densely in sorted order; duplicate records for
/// the same node pair aggregate by weight summation; self-loops are dropped
/// and counted in the result.
LoadResult load_edge_list(const std::string& path, EdgeListFormat format = EdgeListFormat::whitespace);

/// Writes the edge list in the same format (weights with 10 significant digits).
void save_edge_list(const WeightedGraph& g, const std::string& path,
                    EdgeListFormat format = EdgeListFormat::whitespace);

/// Maps every present weight through w -> exp(-1/w), the squashing that puts
/// all weights strictly inside (0, 1). Absent entries stay 0; adjacency is
/// unchanged. Rejects graphs with non-positive present weights.
WeightedGraph normalize_weights(const WeightedGraph& g);

/// Training graph plus the withheld test links.
struct ObservedSplit {
    WeightedGraph observed;       // withheld links have both a_uv and w_uv zeroed
    std::vector<Edge> test_edges; // (u, v, true weight at the time of the split)
    double test_fraction = 0.0;
    std::uint64_t seed = 0;
};

/// Withholds round(test_fraction * |E|) uniformly sampled links. The observed
/// graph has both the weight and the adjacency entry of a withheld link
/// zeroed, so a withheld link is invisible downstream. Deterministic in seed.
ObservedSplit split_train_test(const WeightedGraph& g, double test_fraction, std::uint64_t seed);

/// A*A on the binary adjacency. Off-diagonal entries count common neighbors;
/// the diagonal carries node degree.
Eigen::MatrixXd second_order(const WeightedGraph& g);

/// |N_u ∩ N_v| on the binary adjacency.
int common_neighbors(const WeightedGraph& g, int u, int v);

}  // namespace lwp
