#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gridsa/common.hpp"

namespace gridsa {

enum class BusKind { Slack, PV, PQ };

struct Bus {
    int id = 0;  // external bus number as given in the case file
    BusKind kind = BusKind::PQ;
    double voltage_setpoint = 1.0;  // p.u., meaningful for Slack/PV
    double load_p = 0.0;            // MW
    double load_q = 0.0;            // MVAr
    double gen_p = 0.0;             // MW
    double gen_q = 0.0;             // MVAr
    double base_kv = 0.0;
    double shunt_g = 0.0;  // p.u. conductance to ground on system base
    double shunt_b = 0.0;  // p.u. susceptance to ground on system base

    bool has_load() const { return load_p != 0.0 || load_q != 0.0; }
};

struct Branch {
    int from_bus = 0;  // external bus id
    int to_bus = 0;    // external bus id
    double resistance_r = 0.0;  // p.u.
    double reactance_x = 0.0;   // p.u.
    double charging_b = 0.0;    // p.u., total line charging
    double tap_ratio = 1.0;     // off-nominal turns ratio on the from side; 1 = none
    bool in_service = true;
};

struct GridCase {
    double base_mva = 100.0;
    std::string name;
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    int n() const { return static_cast<int>(buses.size()); }
    // positional index of an external bus id; throws ValidationError if unknown
    int bus_index(int bus_id) const;
    int slack_index() const;
    std::vector<int> load_bus_indices() const;

    void validate() const;

private:
    mutable std::unordered_map<int, int> id_to_index_;
};

// Dense n x n matrices in row-major order; small systems keep this simple.
struct GraphTopology {
    int n = 0;
    std::vector<double> adjacency_a;
    std::vector<double> degree_d;
    std::vector<double> laplacian_l;

    double a(int i, int j) const { return adjacency_a[static_cast<std::size_t>(i) * n + j]; }
    int degree(int i) const { return static_cast<int>(degree_d[static_cast<std::size_t>(i) * n + i]); }
    // undirected edge list (i < j), positional node indices
    std::vector<std::pair<int, int>> edge_list() const;
};

enum class CaseFormat { Cdf, CaseJson };

// Reads an IEEE Common Data Format file or the toolkit JSON case format.
GridCase parse_case(std::istream& source, CaseFormat format);
// Detects the format from the file content (leading '{' means JSON).
GridCase parse_case_file(const std::string& path);

// Builds the 0/1 adjacency over in-service branches; parallel branches between
// the same bus pair collapse to a single edge.
GraphTopology build_topology(const GridCase& grid);

// Returns a copy with the listed branch indices switched out of service.
GridCase apply_contingency(const GridCase& grid, const std::vector<int>& out_branches);

bool is_connected(const GraphTopology& topology);

}  // namespace gridsa
