#pragma once

#include <limits>
#include <vector>

#include "gridsa/grid_model.hpp"
#include "gridsa/powerflow.hpp"

namespace gridsa {

// Undirected graph weighted by line impedance magnitude |Z|; parallel branches
// are combined through their admittances before taking the magnitude.
struct WeightedGraph {
    struct Edge {
        int u = 0;
        int v = 0;
        double w = 0.0;  // p.u. impedance magnitude, > 0
    };
    int n = 0;
    std::vector<Edge> edges;
};

struct CentralityVector {
    std::vector<double> c_d;  // degree centrality
    std::vector<double> c_c;  // clustering coefficient
    std::vector<double> c_b;  // betweenness centrality
    std::vector<double> c_k;  // closeness (average electrical distance)
};

// Node feature matrix, columns fixed as [V_mag, P, Q, C_d, C_c, C_b, C_k].
struct FeatureMatrix {
    static constexpr int kColumns = 7;
    enum Column { Vmag = 0, P = 1, Q = 2, Cd = 3, Cc = 4, Cb = 5, Ck = 6 };

    int n = 0;
    std::vector<double> x;  // row-major n x 7

    double& at(int row, int col) { return x[static_cast<std::size_t>(row) * kColumns + col]; }
    double at(int row, int col) const { return x[static_cast<std::size_t>(row) * kColumns + col]; }
};

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

WeightedGraph build_weighted_graph(const GridCase& grid);

std::vector<double> degree_centrality(const GraphTopology& topology);
std::vector<double> clustering_coefficient(const GraphTopology& topology);

// Minimum summed |Z| over paths from s to t; +infinity when unreachable.
double electrical_distance(const WeightedGraph& graph, int s, int t);

// Brandes accumulation over impedance-weighted shortest paths, endpoints
// excluded, normalized by (n-1)(n-2)/2. Ties in path length are detected with
// relative tolerance 1e-12 and all minimum-weight paths are counted.
std::vector<double> betweenness_centrality(const WeightedGraph& graph);

// Average electrical distance to every other node (the farness-style form;
// deliberately not reciprocated). Throws ValidationError on disconnected input.
std::vector<double> closeness_centrality(const WeightedGraph& graph);

CentralityVector compute_centralities(const GraphTopology& topology, const WeightedGraph& graph);

FeatureMatrix assemble_features(const GridCase& grid, const PowerFlowSolution& solution,
                                const CentralityVector& centralities);

}  // namespace gridsa
