#include "lwp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace lwp {

void WeightedGraph::check_node(int u) const {
    if (u < 0 || u >= node_count_) {
        throw ValidationError("node id " + std::to_string(u) + " out of range [0, " +
                              std::to_string(node_count_) + ")");
    }
}

void WeightedGraph::finish_from_edges() {
    const int n = node_count_;
    adjacency_ = Eigen::MatrixXd::Zero(n, n);
    weights_ = Eigen::MatrixXd::Zero(n, n);
    neighbors_.assign(static_cast<std::size_t>(n), {});
    for (const Edge& e : edges_) {
        adjacency_(e.u, e.v) = 1.0;
        adjacency_(e.v, e.u) = 1.0;
        weights_(e.u, e.v) = e.w;
        weights_(e.v, e.u) = e.w;
        neighbors_[static_cast<std::size_t>(e.u)].push_back(e.v);
        neighbors_[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

WeightedGraph WeightedGraph::from_edges(int node_count, std::vector<Edge> edges) {
    if (node_count < 0) throw ValidationError("node_count must be non-negative");
    if (node_count > kMaxNodes) {
        throw ValidationError("graph has " + std::to_string(node_count) + " nodes; dense storage caps at " +
                              std::to_string(kMaxNodes));
    }
    for (Edge& e : edges) {
        if (e.u == e.v) throw ValidationError("self-loop on node " + std::to_string(e.u));
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.u < 0 || e.v >= node_count) {
            throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") out of range for node_count " + std::to_string(node_count));
        }
        if (!(e.w > 0.0) || !std::isfinite(e.w)) {
            throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") has non-positive or non-finite weight");
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i - 1].u == edges[i].u && edges[i - 1].v == edges[i].v) {
            throw ValidationError("duplicate edge (" + std::to_string(edges[i].u) + "," +
                                  std::to_string(edges[i].v) + ")");
        }
    }
    WeightedGraph g;
    g.node_count_ = node_count;
    g.edges_ = std::move(edges);
    g.finish_from_edges();
    return g;
}

WeightedGraph WeightedGraph::from_matrices(Eigen::MatrixXd adjacency, Eigen::MatrixXd weights) {
    const auto n = adjacency.rows();
    if (adjacency.cols() != n || weights.rows() != n || weights.cols() != n) {
        throw ValidationError("adjacency/weight matrices must be square and same size");
    }
    if (n > kMaxNodes) throw ValidationError("matrix size exceeds dense storage cap");
    std::vector<Edge> edges;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0 || weights(i, i) != 0.0) {
            throw ValidationError("nonzero diagonal at node " + std::to_string(i));
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (adjacency(i, j) != adjacency(j, i) || weights(i, j) != weights(j, i)) {
                throw ValidationError("matrices not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
            const bool present = adjacency(i, j) != 0.0;
            if (present && adjacency(i, j) != 1.0) {
                throw ValidationError("adjacency entries must be 0 or 1");
            }
            if (present != (weights(i, j) > 0.0)) {
                throw ValidationError("adjacency and weights disagree at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
            if (present) {
                edges.push_back({static_cast<int>(i), static_cast<int>(j), weights(i, j)});
            }
        }
    }
    WeightedGraph g;
    g.node_count_ = static_cast<int>(n);
    g.adjacency_ = std::move(adjacency);
    g.weights_ = std::move(weights);
    g.edges_ = std::move(edges);
    g.neighbors_.assign(static_cast<std::size_t>(n), {});
    for (const Edge& e : g.edges_) {
        g.neighbors_[static_cast<std::size_t>(e.u)].push_back(e.v);
        g.neighbors_[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
    return g;
}

double WeightedGraph::min_weight() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Edge& e : edges_) m = std::min(m, e.w);
    return m;
}

double WeightedGraph::max_weight() const {
    double m = 0.0;
    for (const Edge& e : edges_) m = std::max(m, e.w);
    return m;
}

namespace {

struct RawRecord {
    long long u, v;
    double w;
};

}  // namespace

LoadResult load_edge_list(const std::string& path, EdgeListFormat format) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);

    std::vector<RawRecord> records;
    std::string line;
    int lineno = 0;
    int self_loops = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (format == EdgeListFormat::csv) {
            std::replace(line.begin(), line.end(), ',', ' ');
        }
        std::istringstream ss(line);
        long long u, v;
        double w;
        if (!(ss >> u)) continue;  // blank or comment-only line
        if (!(ss >> v >> w)) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected `u v w` record");
        }
        std::string extra;
        if (ss >> extra) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": trailing token '" + extra + "'");
        }
        if (u < 0 || v < 0) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": negative node id");
        }
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": weight must be positive");
        }
        if (u == v) {
            ++self_loops;
            continue;
        }
        records.push_back({u, v, w});
    }

    // Dense re-indexing in sorted id order.
    std::map<long long, int> index;
    for (const RawRecord& r : records) {
        index.emplace(r.u, 0);
        index.emplace(r.v, 0);
    }
    int next = 0;
    for (auto& [id, idx] : index) idx = next++;

    // Aggregate duplicates by weight summation.
    std::map<std::pair<int, int>, double> agg;
    int duplicates = 0;
    for (const RawRecord& r : records) {
        int u = index[r.u], v = index[r.v];
        if (u > v) std::swap(u, v);
        auto [it, inserted] = agg.emplace(std::make_pair(u, v), r.w);
        if (!inserted) {
            it->second += r.w;
            ++duplicates;
        }
    }

    std::vector<Edge> edges;
    edges.reserve(agg.size());
    for (const auto& [uv, w] : agg) edges.push_back({uv.first, uv.second, w});

    LoadResult out;
    out.graph = WeightedGraph::from_edges(next, std::move(edges));
    out.self_loops_dropped = self_loops;
    out.duplicates_aggregated = duplicates;
    return out;
}

void save_edge_list(const WeightedGraph& g, const std::string& path, EdgeListFormat format) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    const char sep = format == EdgeListFormat::csv ? ',' : ' ';
    out.precision(10);
    for (const Edge& e : g.edges()) {
        out << e.u << sep << e.v << sep << e.w << '\n';
    }
    if (!out) throw ValidationError("write failed for " + path);
}

WeightedGraph normalize_weights(const WeightedGraph& g) {
    std::vector<Edge> edges = g.edges();
    for (Edge& e : edges) {
        if (!(e.w > 0.0)) throw ValidationError("cannot normalize non-positive weight");
        e.w = std::exp(-1.0 / e.w);
        if (!(e.w < 1.0)) {
            throw ValidationError("weight too large to normalize strictly below 1");
        }
        if (e.w == 0.0) {
            // exp(-1/w) underflows only for w below ~1/745; keep the smallest
            // positive double so the link stays present.
            e.w = std::numeric_limits<double>::denorm_min();
        }
    }
    return WeightedGraph::from_edges(g.node_count(), std::move(edges));
}

ObservedSplit split_train_test(const WeightedGraph& g, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("test_fraction must lie in (0, 1)");
    }
    if (g.edge_count() < 10) {
        throw ValidationError("graph too small to split (need >= 10 edges)");
    }
    const auto num_edges = static_cast<std::size_t>(g.edge_count());
    const auto num_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(num_edges)));

    // Partial Fisher-Yates over edge indices; first num_test entries become the test set.
    std::vector<std::size_t> order(num_edges);
    for (std::size_t i = 0; i < num_edges; ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < num_test; ++i) {
        const std::size_t j = i + rng.index(num_edges - i);
        std::swap(order[i], order[j]);
    }

    std::vector<char> withheld(num_edges, 0);
    for (std::size_t i = 0; i < num_test; ++i) withheld[order[i]] = 1;

    std::vector<Edge> train, test;
    train.reserve(num_edges - num_test);
    test.reserve(num_test);
    for (std::size_t i = 0; i < num_edges; ++i) {
        (withheld[i] ? test : train).push_back(g.edges()[i]);
    }
    std::sort(test.begin(), test.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });

    ObservedSplit split;
    split.observed = WeightedGraph::from_edges(g.node_count(), std::move(train));
    split.test_edges = std::move(test);
    split.test_fraction = test_fraction;
    split.seed = seed;
    return split;
}

Eigen::MatrixXd second_order(const WeightedGraph& g) {
    return g.adjacency() * g.adjacency();
}

int common_neighbors(const WeightedGraph& g, int u, int v) {
    g.check_node(u);
    g.check_node(v);
    if (u == v) throw ValidationError("common_neighbors requires distinct nodes");
    const auto& nu = g.neighbors()[static_cast<std::size_t>(u)];
    const auto& nv = g.neighbors()[static_cast<std::size_t>(v)];
    int count = 0;
    std::size_t i = 0, j = 0;
    while (i < nu.size() && j < nv.size()) {
        if (nu[i] < nv[j]) {
            ++i;
        } else if (nu[i] > nv[j]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace lwp
