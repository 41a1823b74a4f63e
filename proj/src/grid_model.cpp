#include "gridsa/grid_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gridsa {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// 1-based inclusive column slice, tolerant of short lines
std::string cols(const std::string& line, std::size_t first, std::size_t last) {
    if (line.size() < first) return "";
    return trim(line.substr(first - 1, last - first + 1));
}

double parse_num(const std::string& field, int line_no, const char* what) {
    if (field.empty()) return 0.0;
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " field '" + field +
                         "'");
    }
}

int parse_int(const std::string& field, int line_no, const char* what) {
    return static_cast<int>(parse_num(field, line_no, what));
}

GridCase parse_cdf(std::istream& in) {
    GridCase grid;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty CDF source");
    ++line_no;
    grid.base_mva = parse_num(cols(line, 32, 37), line_no, "MVA base");
    if (grid.base_mva <= 0) grid.base_mva = 100.0;
    grid.name = cols(line, 46, 73);

    enum class Section { None, Bus, Branch } section = Section::None;
    while (std::getline(in, line)) {
        ++line_no;
        std::string upper = line;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (upper.find("BUS DATA") != std::string::npos) {
            section = Section::Bus;
            continue;
        }
        if (upper.find("BRANCH DATA") != std::string::npos) {
            section = Section::Branch;
            continue;
        }
        std::string head = trim(line.substr(0, std::min<std::size_t>(line.size(), 8)));
        if (head == "-999" || head == "-99" || upper.rfind("END OF DATA", 0) == 0) {
            section = Section::None;
            continue;
        }
        if (section == Section::None || trim(line).empty()) continue;

        if (section == Section::Bus) {
            Bus bus;
            bus.id = parse_int(cols(line, 1, 4), line_no, "bus number");
            int type = parse_int(cols(line, 25, 26), line_no, "bus type");
            switch (type) {
                case 3: bus.kind = BusKind::Slack; break;
                case 2: bus.kind = BusKind::PV; break;
                default: bus.kind = BusKind::PQ; break;
            }
            bus.load_p = parse_num(cols(line, 41, 49), line_no, "load MW");
            bus.load_q = parse_num(cols(line, 50, 59), line_no, "load MVAr");
            bus.gen_p = parse_num(cols(line, 60, 67), line_no, "gen MW");
            bus.gen_q = parse_num(cols(line, 68, 75), line_no, "gen MVAr");
            bus.base_kv = parse_num(cols(line, 77, 83), line_no, "base kV");
            double desired_v = parse_num(cols(line, 85, 90), line_no, "desired volts");
            if (bus.kind != BusKind::PQ) {
                if (desired_v <= 0) desired_v = parse_num(cols(line, 28, 33), line_no, "voltage");
                bus.voltage_setpoint = desired_v > 0 ? desired_v : 1.0;
            }
            bus.shunt_g = parse_num(cols(line, 107, 114), line_no, "shunt G");
            bus.shunt_b = parse_num(cols(line, 115, 122), line_no, "shunt B");
            grid.buses.push_back(bus);
        } else {
            Branch br;
            br.from_bus = parse_int(cols(line, 1, 4), line_no, "from bus");
            br.to_bus = parse_int(cols(line, 6, 9), line_no, "to bus");
            br.resistance_r = parse_num(cols(line, 20, 29), line_no, "resistance");
            br.reactance_x = parse_num(cols(line, 30, 40), line_no, "reactance");
            br.charging_b = parse_num(cols(line, 41, 50), line_no, "line charging");
            double ratio = parse_num(cols(line, 77, 82), line_no, "turns ratio");
            br.tap_ratio = ratio > 0 ? ratio : 1.0;
            grid.branches.push_back(br);
        }
    }
    return grid;
}

BusKind bus_kind_from_string(const std::string& s) {
    if (s == "Slack" || s == "slack") return BusKind::Slack;
    if (s == "PV" || s == "pv") return BusKind::PV;
    if (s == "PQ" || s == "pq") return BusKind::PQ;
    throw ParseError("unknown bus kind '" + s + "'");
}

GridCase parse_case_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("case JSON: ") + e.what());
    }
    GridCase grid;
    grid.base_mva = j.value("base_mva", 100.0);
    grid.name = j.value("name", "");
    for (const auto& jb : j.at("buses")) {
        Bus bus;
        bus.id = jb.at("id").get<int>();
        bus.kind = bus_kind_from_string(jb.at("kind").get<std::string>());
        bus.voltage_setpoint = jb.value("voltage_setpoint", 1.0);
        bus.load_p = jb.value("load_p", 0.0);
        bus.load_q = jb.value("load_q", 0.0);
        bus.gen_p = jb.value("gen_p", 0.0);
        bus.gen_q = jb.value("gen_q", 0.0);
        bus.base_kv = jb.value("base_kv", 0.0);
        bus.shunt_g = jb.value("shunt_g", 0.0);
        bus.shunt_b = jb.value("shunt_b", 0.0);
        grid.buses.push_back(bus);
    }
    for (const auto& jb : j.at("branches")) {
        Branch br;
        br.from_bus = jb.at("from_bus").get<int>();
        br.to_bus = jb.at("to_bus").get<int>();
        br.resistance_r = jb.value("resistance_r", 0.0);
        br.reactance_x = jb.value("reactance_x", 0.0);
        br.charging_b = jb.value("charging_b", 0.0);
        br.tap_ratio = jb.value("tap_ratio", 1.0);
        br.in_service = jb.value("in_service", true);
        grid.branches.push_back(br);
    }
    return grid;
}

}  // namespace

int GridCase::bus_index(int bus_id) const {
    if (id_to_index_.size() != buses.size()) {
        id_to_index_.clear();
        for (int i = 0; i < n(); ++i) id_to_index_[buses[static_cast<std::size_t>(i)].id] = i;
    }
    auto it = id_to_index_.find(bus_id);
    if (it == id_to_index_.end())
        throw ValidationError("unknown bus id " + std::to_string(bus_id));
    return it->second;
}

int GridCase::slack_index() const {
    for (int i = 0; i < n(); ++i)
        if (buses[static_cast<std::size_t>(i)].kind == BusKind::Slack) return i;
    throw ValidationError("case has no slack bus");
}

std::vector<int> GridCase::load_bus_indices() const {
    std::vector<int> out;
    for (int i = 0; i < n(); ++i)
        if (buses[static_cast<std::size_t>(i)].has_load()) out.push_back(i);
    return out;
}

void GridCase::validate() const {
    if (buses.empty()) throw ValidationError("case has no buses");
    int slack_count = 0;
    std::set<int> ids;
    for (const auto& bus : buses) {
        if (!ids.insert(bus.id).second)
            throw ValidationError("duplicate bus id " + std::to_string(bus.id));
        if (bus.kind == BusKind::Slack) ++slack_count;
        if (!std::isfinite(bus.load_p) || !std::isfinite(bus.load_q))
            throw ValidationError("non-finite load at bus " + std::to_string(bus.id));
        if (bus.kind != BusKind::PQ && bus.voltage_setpoint <= 0)
            throw ValidationError("non-positive voltage setpoint at bus " + std::to_string(bus.id));
    }
    if (slack_count != 1)
        throw ValidationError("case must have exactly one slack bus, found " +
                              std::to_string(slack_count));
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const auto& br = branches[k];
        if (!ids.count(br.from_bus) || !ids.count(br.to_bus))
            throw ValidationError("branch " + std::to_string(k) + " references unknown bus");
        if (br.from_bus == br.to_bus)
            throw ValidationError("branch " + std::to_string(k) + " is a self loop");
        if (br.resistance_r == 0.0 && br.reactance_x == 0.0)
            throw ValidationError("branch " + std::to_string(k) + " has zero impedance");
        if (br.resistance_r < 0)
            throw ValidationError("branch " + std::to_string(k) + " has negative resistance");
    }
}

GridCase parse_case(std::istream& source, CaseFormat format) {
    GridCase grid =
        format == CaseFormat::Cdf ? parse_cdf(source) : parse_case_json(source);
    grid.validate();
    return grid;
}

GridCase parse_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open case file: " + path);
    int first = in.peek();
    CaseFormat format = (first == '{') ? CaseFormat::CaseJson : CaseFormat::Cdf;
    GridCase grid = parse_case(in, format);
    if (grid.name.empty()) grid.name = path;
    return grid;
}

GraphTopology build_topology(const GridCase& grid) {
    grid.validate();
    int n = grid.n();
    GraphTopology topo;
    topo.n = n;
    std::size_t nn = static_cast<std::size_t>(n) * n;
    topo.adjacency_a.assign(nn, 0.0);
    topo.degree_d.assign(nn, 0.0);
    topo.laplacian_l.assign(nn, 0.0);

    for (const auto& br : grid.branches) {
        if (!br.in_service) continue;
        int i = grid.bus_index(br.from_bus);
        int j = grid.bus_index(br.to_bus);
        topo.adjacency_a[static_cast<std::size_t>(i) * n + j] = 1.0;
        topo.adjacency_a[static_cast<std::size_t>(j) * n + i] = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < n; ++j) deg += topo.adjacency_a[static_cast<std::size_t>(i) * n + j];
        topo.degree_d[static_cast<std::size_t>(i) * n + i] = deg;
    }
    for (std::size_t k = 0; k < nn; ++k)
        topo.laplacian_l[k] = topo.degree_d[k] - topo.adjacency_a[k];
    return topo;
}

std::vector<std::pair<int, int>> GraphTopology::edge_list() const {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a(i, j) != 0.0) edges.emplace_back(i, j);
    return edges;
}

GridCase apply_contingency(const GridCase& grid, const std::vector<int>& out_branches) {
    GridCase result = grid;
    for (int idx : out_branches) {
        if (idx < 0 || idx >= static_cast<int>(result.branches.size()))
            throw ValidationError("contingency branch index " + std::to_string(idx) +
                                  " out of range");
        result.branches[static_cast<std::size_t>(idx)].in_service = false;
    }
    bool any = false;
    for (const auto& br : result.branches) any = any || br.in_service;
    if (!any) throw ValidationError("contingency removes every branch");
    return result;
}

bool is_connected(const GraphTopology& topology) {
    int n = topology.n;
    if (n <= 1) return true;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (topology.a(u, v) != 0.0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

}  // namespace gridsa
