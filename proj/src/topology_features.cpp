#include "gridsa/topology_features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <queue>

namespace gridsa {

namespace {

constexpr double kTieRelTol = 1e-12;

bool same_distance(double a, double b) {
    return std::abs(a - b) <= kTieRelTol * std::max(std::abs(a), std::abs(b));
}

struct AdjacencyList {
    std::vector<std::vector<std::pair<int, double>>> nbrs;

    explicit AdjacencyList(const WeightedGraph& g) : nbrs(static_cast<std::size_t>(g.n)) {
        for (const auto& e : g.edges) {
            nbrs[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
            nbrs[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
        }
    }
};

struct DijkstraResult {
    std::vector<double> dist;
    std::vector<double> sigma;               // shortest-path counts
    std::vector<std::vector<int>> preds;     // predecessors on shortest paths
    std::vector<int> settle_order;
};

DijkstraResult dijkstra(const AdjacencyList& adj, int n, int source, bool track_paths) {
    DijkstraResult res;
    res.dist.assign(static_cast<std::size_t>(n), kUnreachable);
    res.sigma.assign(static_cast<std::size_t>(n), 0.0);
    if (track_paths) res.preds.assign(static_cast<std::size_t>(n), {});
    std::vector<char> settled(static_cast<std::size_t>(n), 0);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    res.dist[static_cast<std::size_t>(source)] = 0.0;
    res.sigma[static_cast<std::size_t>(source)] = 1.0;
    pq.emplace(0.0, source);

    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        res.settle_order.push_back(u);
        for (const auto& [v, w] : adj.nbrs[static_cast<std::size_t>(u)]) {
            if (settled[static_cast<std::size_t>(v)]) continue;
            double cand = res.dist[static_cast<std::size_t>(u)] + w;
            double& dv = res.dist[static_cast<std::size_t>(v)];
            if (cand < dv && !same_distance(cand, dv)) {
                dv = cand;
                res.sigma[static_cast<std::size_t>(v)] = res.sigma[static_cast<std::size_t>(u)];
                if (track_paths) res.preds[static_cast<std::size_t>(v)] = {u};
                pq.emplace(cand, v);
            } else if (same_distance(cand, dv)) {
                res.sigma[static_cast<std::size_t>(v)] += res.sigma[static_cast<std::size_t>(u)];
                if (track_paths) res.preds[static_cast<std::size_t>(v)].push_back(u);
            }
        }
    }
    return res;
}

}  // namespace

WeightedGraph build_weighted_graph(const GridCase& grid) {
    // parallel branches combine through admittances, then |Z| of the result
    std::map<std::pair<int, int>, std::complex<double>> admittance;
    for (const auto& br : grid.branches) {
        if (!br.in_service) continue;
        int i = grid.bus_index(br.from_bus);
        int j = grid.bus_index(br.to_bus);
        auto key = std::minmax(i, j);
        admittance[key] += 1.0 / std::complex<double>(br.resistance_r, br.reactance_x);
    }
    WeightedGraph g;
    g.n = grid.n();
    for (const auto& [key, y] : admittance) {
        double w = std::abs(1.0 / y);
        if (!(w > 0.0) || !std::isfinite(w))
            throw ValidationError("non-positive impedance between buses " +
                                  std::to_string(key.first) + " and " + std::to_string(key.second));
        g.edges.push_back({key.first, key.second, w});
    }
    return g;
}

std::vector<double> degree_centrality(const GraphTopology& topology) {
    int n = topology.n;
    if (n < 2) throw ValidationError("degree centrality needs at least two nodes");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        out[static_cast<std::size_t>(v)] =
            topology.laplacian_l[static_cast<std::size_t>(v) * n + v] / static_cast<double>(n - 1);
    return out;
}

std::vector<double> clustering_coefficient(const GraphTopology& topology) {
    int n = topology.n;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int v = 0; v < n; ++v) {
        std::vector<int> nbrs;
        for (int u = 0; u < n; ++u)
            if (topology.a(v, u) != 0.0) nbrs.push_back(u);
        int k = static_cast<int>(nbrs.size());
        if (k < 2) continue;  // 0/0 by convention
        int links = 0;
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b)
                if (topology.a(nbrs[a], nbrs[b]) != 0.0) ++links;
        out[static_cast<std::size_t>(v)] =
            2.0 * static_cast<double>(links) / (static_cast<double>(k) * (k - 1));
    }
    return out;
}

double electrical_distance(const WeightedGraph& graph, int s, int t) {
    if (s < 0 || s >= graph.n || t < 0 || t >= graph.n)
        throw ValidationError("electrical_distance node out of range");
    if (s == t) return 0.0;
    AdjacencyList adj(graph);
    DijkstraResult res = dijkstra(adj, graph.n, s, false);
    return res.dist[static_cast<std::size_t>(t)];
}

std::vector<double> betweenness_centrality(const WeightedGraph& graph) {
    int n = graph.n;
    std::vector<double> cb(static_cast<std::size_t>(n), 0.0);
    if (n < 3) return cb;  // degenerate denominator
    AdjacencyList adj(graph);

    for (int s = 0; s < n; ++s) {
        DijkstraResult res = dijkstra(adj, n, s, true);
        std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
        for (auto it = res.settle_order.rbegin(); it != res.settle_order.rend(); ++it) {
            int w = *it;
            for (int v : res.preds[static_cast<std::size_t>(w)])
                delta[static_cast<std::size_t>(v)] +=
                    res.sigma[static_cast<std::size_t>(v)] / res.sigma[static_cast<std::size_t>(w)] *
                    (1.0 + delta[static_cast<std::size_t>(w)]);
            if (w != s) cb[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
        }
    }
    // each unordered pair was accumulated from both endpoints
    double norm = (static_cast<double>(n) - 1.0) * (static_cast<double>(n) - 2.0);
    for (double& x : cb) x /= norm;
    return cb;
}

std::vector<double> closeness_centrality(const WeightedGraph& graph) {
    int n = graph.n;
    if (n < 2) throw ValidationError("closeness centrality needs at least two nodes");
    AdjacencyList adj(graph);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int v = 0; v < n; ++v) {
        DijkstraResult res = dijkstra(adj, n, v, false);
        double sum = 0.0;
        for (int t = 0; t < n; ++t) {
            if (t == v) continue;
            double d = res.dist[static_cast<std::size_t>(t)];
            if (!std::isfinite(d))
                throw ValidationError("closeness centrality undefined on a disconnected graph");
            sum += d;
        }
        out[static_cast<std::size_t>(v)] = sum / static_cast<double>(n - 1);
    }
    return out;
}

CentralityVector compute_centralities(const GraphTopology& topology, const WeightedGraph& graph) {
    CentralityVector c;
    c.c_d = degree_centrality(topology);
    c.c_c = clustering_coefficient(topology);
    c.c_b = betweenness_centrality(graph);
    c.c_k = closeness_centrality(graph);
    return c;
}

FeatureMatrix assemble_features(const GridCase& grid, const PowerFlowSolution& solution,
                                const CentralityVector& centralities) {
    int n = grid.n();
    if (!solution.converged) throw ValidationError("assemble_features needs a converged solution");
    if (static_cast<int>(solution.v_mag.size()) != n ||
        static_cast<int>(centralities.c_d.size()) != n ||
        static_cast<int>(centralities.c_c.size()) != n ||
        static_cast<int>(centralities.c_b.size()) != n ||
        static_cast<int>(centralities.c_k.size()) != n)
        throw ValidationError("assemble_features dimension mismatch");

    FeatureMatrix f;
    f.n = n;
    f.x.resize(static_cast<std::size_t>(n) * FeatureMatrix::kColumns);
    for (int i = 0; i < n; ++i) {
        std::size_t si = static_cast<std::size_t>(i);
        f.at(i, FeatureMatrix::Vmag) = solution.v_mag[si];
        f.at(i, FeatureMatrix::P) = solution.p_injection[si] / grid.base_mva;
        f.at(i, FeatureMatrix::Q) = solution.q_injection[si] / grid.base_mva;
        f.at(i, FeatureMatrix::Cd) = centralities.c_d[si];
        f.at(i, FeatureMatrix::Cc) = centralities.c_c[si];
        f.at(i, FeatureMatrix::Cb) = centralities.c_b[si];
        f.at(i, FeatureMatrix::Ck) = centralities.c_k[si];
    }
    for (double v : f.x)
        if (!std::isfinite(v)) throw NumericError("feature matrix contains a non-finite value");
    return f;
}

}  // namespace gridsa
