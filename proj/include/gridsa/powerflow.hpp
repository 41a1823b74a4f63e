#pragma once

#include <complex>
#include <string>
#include <vector>

#include "gridsa/grid_model.hpp"

namespace gridsa {

struct AdmittanceMatrix {
    int n = 0;
    std::vector<std::complex<double>> y;  // row-major n x n, p.u.

    std::complex<double>& at(int i, int j) { return y[static_cast<std::size_t>(i) * n + j]; }
    const std::complex<double>& at(int i, int j) const { return y[static_cast<std::size_t>(i) * n + j]; }
};

struct PowerFlowSolution {
    std::vector<double> v_mag;        // p.u.
    std::vector<double> v_angle;      // rad, slack at 0
    std::vector<double> p_injection;  // MW, net injection per bus
    std::vector<double> q_injection;  // MVAr
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;  // MW equivalent
    std::string diagnostic;
};

struct TransferSweepParams {
    double initial_transfer = 10.0;  // MW
    double increment = 10.0;         // MW
    double max_transfer = 1000.0;    // MW
    double mismatch_tol = 0.5;       // MW
    std::vector<int> source_buses;   // external bus ids, generation side
    std::vector<int> sink_buses;     // external bus ids, load side
};

struct VoltageBand {
    double v_min = 0.90;
    double v_max = 1.10;
};

struct TransferSweepResult {
    // converged operating points in transfer order; point i corresponds to
    // transfer = initial_transfer + i * increment
    std::vector<PowerFlowSolution> points;
    int steps_attempted = 0;
    std::string termination;  // "max_transfer" | "not_converged" | "voltage_violation"
};

AdmittanceMatrix build_admittance(const GridCase& grid);

// Full Newton-Raphson in polar form from a flat start. tol is the p.u. power
// mismatch threshold; PV buses hold their voltage setpoints (no Q limits).
PowerFlowSolution solve_newton_raphson(const GridCase& grid, double tol = 1e-6, int max_iter = 30);

// Returns the case with `transfer_mw` moved from the source set onto the sink
// set, split proportionally to base values, sinks at constant power factor.
GridCase apply_transfer(const GridCase& grid, const TransferSweepParams& params, double transfer_mw);

// Incremental-transfer sweep: solves at each step and stops at max_transfer,
// on the first non-converged step, or after the first voltage-band violation.
TransferSweepResult pv_transfer_sweep(const GridCase& grid, const TransferSweepParams& params,
                                      const VoltageBand& band = {});

}  // namespace gridsa
