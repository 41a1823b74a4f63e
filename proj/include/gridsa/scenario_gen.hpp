#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridsa/grid_model.hpp"
#include "gridsa/powerflow.hpp"
#include "gridsa/topology_features.hpp"

namespace gridsa {

struct LoadProfile {
    std::array<double, 24> hourly_factors{};
    double load_bus_fraction = 0.7;

    // Toolkit default shaped like the CAISO 2020 net-load duck curve (midday
    // belly, evening head). These are stand-in values, not measured data; any
    // 24-vector may be supplied instead.
    static LoadProfile duck_curve_default();
};

struct SecurityCriterion {
    double v_min = 0.90;
    double v_max = 1.10;

    VoltageBand band() const { return {v_min, v_max}; }
};

enum class SecurityLabel : int { Insecure = 0, Secure = 1 };

struct SampleMeta {
    long scenario_id = 0;
    int hour = -1;  // -1 when no hourly scaling was applied
    std::vector<int> contingency_branches;
    double transfer_mw = 0.0;
};

struct LabeledGraphSample {
    std::vector<std::pair<int, int>> edges;  // post-contingency, collapsed
    FeatureMatrix features;
    SecurityLabel label = SecurityLabel::Secure;
    SampleMeta meta;
};

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;

    bool empty() const { return train.empty() && validation.empty() && test.empty(); }
};

struct GraphDataset {
    std::vector<LabeledGraphSample> samples;
    SplitIndices split;
    std::uint64_t seed = 0;
    std::string case_name;
    SecurityCriterion criterion;

    int size() const { return static_cast<int>(samples.size()); }
    double secure_fraction() const;
};

// One structured record per scenario that produced no samples.
struct ScenarioDiagnostics {
    struct Record {
        long scenario_id;
        int hour;
        std::vector<int> contingency_branches;
        std::string reason;  // "islanded" | "not_converged"
    };
    std::vector<Record> skipped;
};

// Scales load_p/load_q of a seeded random 70% (ceil) of load buses by the
// hour's factor and redispatches generation proportionally to keep the MW
// balance of the pre-solve schedule.
GridCase scale_loads(const GridCase& grid, const LoadProfile& profile, int hour,
                     std::uint64_t rng_seed);

SecurityLabel label_solution(const PowerFlowSolution& solution, const SecurityCriterion& criterion);

// Procedure: for each hour x contingency, scale loads, switch branches out,
// skip islanded grids, sweep the transfer, and keep every converged point as a
// labeled sample. An empty contingency list means the intact grid.
GraphDataset generate_dataset(const GridCase& grid, const LoadProfile& profile,
                              const std::vector<std::vector<int>>& contingencies,
                              const TransferSweepParams& sweep, const SecurityCriterion& criterion,
                              std::uint64_t seed, ScenarioDiagnostics* diagnostics = nullptr);

// Double-line (N-1-1) scenarios from the unscaled operating point: every
// non-islanding branch pair yields its base solution, and a random subset of
// pair_sample_count pairs additionally gets the transfer sweep.
GraphDataset generate_n11_dataset(const GridCase& grid, const LoadProfile& profile,
                                  const TransferSweepParams& sweep,
                                  const SecurityCriterion& criterion, std::uint64_t seed,
                                  int pair_sample_count,
                                  ScenarioDiagnostics* diagnostics = nullptr);

// Multiplies the V_mag feature of ceil(bus_fraction * n) random nodes per
// sample by (1 + magnitude_fraction). Labels are left untouched: the
// perturbation models measurement error, not a new physical state.
GraphDataset perturb_voltages(const GraphDataset& dataset, double bus_fraction,
                              double magnitude_fraction, std::uint64_t seed);

// Seeded permutation, then contiguous slices at the cumulative-floor
// boundaries of the ratios.
GraphDataset split_dataset(GraphDataset dataset, std::array<double, 3> ratios, std::uint64_t seed);
inline GraphDataset split_dataset(GraphDataset dataset, std::uint64_t seed) {
    return split_dataset(std::move(dataset), {0.6, 0.2, 0.2}, seed);
}

// JSON-lines serialization: a header record followed by one record per sample.
void save_dataset(const GraphDataset& dataset, std::ostream& sink);
void save_dataset_file(const GraphDataset& dataset, const std::string& path);
GraphDataset load_dataset(std::istream& source);
GraphDataset load_dataset_file(const std::string& path);

// All in-service branch indices as single-outage scenarios.
std::vector<std::vector<int>> n_minus_one_contingencies(const GridCase& grid);

}  // namespace gridsa
