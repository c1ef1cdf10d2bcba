#include "lwp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lwp {

void SynthConfig::validate() const {
    if (nodes < 4) throw ValidationError("synth: need at least 4 nodes");
    if (nodes > kMaxNodes) throw ValidationError("synth: node count exceeds storage cap");
    if (edges < nodes) throw ValidationError("synth: need at least `nodes` edges");
    const long long max_edges = static_cast<long long>(nodes) * (nodes - 1) / 2;
    if (edges > max_edges) throw ValidationError("synth: edge count exceeds complete graph");
    if (!(weight_lo > 0.0) || !(weight_hi > weight_lo)) {
        throw ValidationError("synth: need 0 < weight_lo < weight_hi");
    }
    if (!(weight_shape > 0.0)) throw ValidationError("synth: weight_shape must be positive");
    if (!(closure >= 0.0 && closure <= 1.0)) throw ValidationError("synth: closure must be in [0,1]");
    if (mass_sigma < 0.0 || noise_sigma < 0.0 || cn_weight < 0.0) {
        throw ValidationError("synth: sigmas and cn_weight must be non-negative");
    }
}

namespace {

struct Builder {
    int n;
    std::vector<std::vector<int>> nbrs;
    std::vector<std::vector<char>> present;
    std::vector<int> ends;  // each edge pushes both endpoints; uniform draws give degree-proportional sampling
    std::vector<std::pair<int, int>> edges;

    explicit Builder(int nodes)
        : n(nodes),
          nbrs(static_cast<std::size_t>(nodes)),
          present(static_cast<std::size_t>(nodes), std::vector<char>(static_cast<std::size_t>(nodes), 0)) {}

    bool has(int u, int v) const { return present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] != 0; }

    void add(int u, int v) {
        present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
        present[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
        nbrs[static_cast<std::size_t>(u)].push_back(v);
        nbrs[static_cast<std::size_t>(v)].push_back(u);
        ends.push_back(u);
        ends.push_back(v);
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
};

}  // namespace

WeightedGraph make_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Builder b(cfg.nodes);

    b.add(0, 1);
    b.add(1, 2);
    b.add(0, 2);

    const double mean_m = static_cast<double>(cfg.edges - 3) / static_cast<double>(cfg.nodes - 3);
    for (int t = 3; t < cfg.nodes; ++t) {
        int want = static_cast<int>(mean_m);
        if (rng.unit() < mean_m - std::floor(mean_m)) ++want;
        want = std::clamp(want, 1, t);
        int added = 0;
        int last = -1;
        for (int attempt = 0; attempt < 300 && added < want; ++attempt) {
            int cand;
            if (last >= 0 && rng.unit() < cfg.closure) {
                const auto& nl = b.nbrs[static_cast<std::size_t>(last)];
                cand = nl[rng.index(nl.size())];
            } else {
                cand = b.ends[rng.index(b.ends.size())];
            }
            if (cand == t || b.has(t, cand)) continue;
            b.add(t, cand);
            last = cand;
            ++added;
        }
        if (added == 0) b.add(t, static_cast<int>(rng.index(static_cast<std::size_t>(t))));
    }

    const auto target = static_cast<std::size_t>(cfg.edges);
    for (long long attempt = 0; b.edges.size() < target && attempt < 60LL * cfg.edges; ++attempt) {
        const int u = b.ends[rng.index(b.ends.size())];
        int v;
        if (rng.unit() < cfg.closure) {
            const auto& nu = b.nbrs[static_cast<std::size_t>(u)];
            const int x = nu[rng.index(nu.size())];
            const auto& nx = b.nbrs[static_cast<std::size_t>(x)];
            v = nx[rng.index(nx.size())];
        } else {
            v = b.ends[rng.index(b.ends.size())];
        }
        if (u != v && !b.has(u, v)) b.add(u, v);
    }
    // Deterministic fallback so the requested edge count is met even if the
    // sampling loop stalls on a nearly saturated graph.
    for (int u = 0; u < cfg.nodes && b.edges.size() < target; ++u) {
        for (int v = u + 1; v < cfg.nodes && b.edges.size() < target; ++v) {
            if (!b.has(u, v)) b.add(u, v);
        }
    }

    for (auto& nl : b.nbrs) std::sort(nl.begin(), nl.end());

    std::vector<double> mass_log(static_cast<std::size_t>(cfg.nodes));
    for (double& m : mass_log) m = cfg.mass_sigma * rng.normal();

    const auto cn_count = [&b](int u, int v) {
        const auto& nu = b.nbrs[static_cast<std::size_t>(u)];
        const auto& nv = b.nbrs[static_cast<std::size_t>(v)];
        int c = 0;
        std::size_t i = 0, j = 0;
        while (i < nu.size() && j < nv.size()) {
            if (nu[i] < nv[j]) {
                ++i;
            } else if (nu[i] > nv[j]) {
                ++j;
            } else {
                ++c;
                ++i;
                ++j;
            }
        }
        return c;
    };

    std::sort(b.edges.begin(), b.edges.end());
    std::vector<double> score(b.edges.size());
    for (std::size_t i = 0; i < b.edges.size(); ++i) {
        const auto [u, v] = b.edges[i];
        score[i] = cfg.cn_weight * std::log1p(static_cast<double>(cn_count(u, v))) +
                   mass_log[static_cast<std::size_t>(u)] + mass_log[static_cast<std::size_t>(v)] +
                   cfg.noise_sigma * rng.normal();
    }

    // Rank-map scores onto [lo, hi]: the lowest score gets exactly lo, the
    // highest exactly hi, and weight_shape skews mass toward lo.
    std::vector<std::size_t> order(b.edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        if (score[a] != score[c]) return score[a] < score[c];
        return b.edges[a] < b.edges[c];
    });

    std::vector<Edge> out(b.edges.size());
    const double ratio = cfg.weight_hi / cfg.weight_lo;
    const auto denom = static_cast<double>(b.edges.size() - 1);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t i = order[rank];
        const double q = static_cast<double>(rank) / denom;
        const double w = cfg.weight_lo * std::pow(ratio, std::pow(q, cfg.weight_shape));
        out[i] = {b.edges[i].first, b.edges[i].second, w};
    }
    return WeightedGraph::from_edges(cfg.nodes, std::move(out));
}

SynthConfig synth_preset(const std::string& name) {
    SynthConfig c;
    if (name == "neural") {
        c.nodes = 296;
        c.edges = 2137;
        c.weight_lo = 1.0;
        c.weight_hi = 72.0;
        c.weight_shape = 2.2;
    } else if (name == "celegans") {
        c.nodes = 453;
        c.edges = 2025;
        c.weight_lo = 1.0;
        c.weight_hi = 114.0;
        c.weight_shape = 2.4;
    } else if (name == "netscience") {
        c.nodes = 575;
        c.edges = 1028;
        c.weight_lo = 0.0526;
        c.weight_hi = 2.5;
        c.weight_shape = 1.5;
    } else if (name == "ucnet") {
        c.nodes = 700;
        c.edges = 5100;
        c.weight_lo = 1.0;
        c.weight_hi = 184.0;
        c.weight_shape = 2.4;
    } else if (name == "mid") {
        c.nodes = 300;
        c.edges = 1800;
        c.weight_lo = 1.0;
        c.weight_hi = 50.0;
        c.weight_shape = 2.0;
    } else if (name == "tiny") {
        c.nodes = 60;
        c.edges = 180;
        c.weight_lo = 1.0;
        c.weight_hi = 20.0;
        c.weight_shape = 1.8;
    } else {
        throw ValidationError("unknown synth preset '" + name + "'");
    }
    return c;
}

std::vector<std::string> synth_preset_names() {
    return {"neural", "celegans", "netscience", "ucnet", "mid", "tiny"};
}

}  // namespace lwp
