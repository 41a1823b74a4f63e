#include "gridsa/powerflow.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace gridsa {

namespace {

struct BusSets {
    int slack = -1;
    std::vector<int> pv;
    std::vector<int> pq;
    std::vector<int> non_slack;  // pv + pq in bus order
};

BusSets classify(const GridCase& grid) {
    BusSets sets;
    for (int i = 0; i < grid.n(); ++i) {
        const Bus& bus = grid.buses[static_cast<std::size_t>(i)];
        switch (bus.kind) {
            case BusKind::Slack: sets.slack = i; break;
            case BusKind::PV: sets.pv.push_back(i); sets.non_slack.push_back(i); break;
            case BusKind::PQ: sets.pq.push_back(i); sets.non_slack.push_back(i); break;
        }
    }
    return sets;
}

// P_i(V, theta) and Q_i(V, theta) in p.u. from the admittance matrix
void calc_injections(const AdmittanceMatrix& ybus, const std::vector<double>& v,
                     const std::vector<double>& th, std::vector<double>& p,
                     std::vector<double>& q) {
    int n = ybus.n;
    p.assign(static_cast<std::size_t>(n), 0.0);
    q.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double pi = 0.0, qi = 0.0;
        for (int j = 0; j < n; ++j) {
            const auto& yij = ybus.at(i, j);
            if (yij.real() == 0.0 && yij.imag() == 0.0) continue;
            double dth = th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)];
            double c = std::cos(dth), s = std::sin(dth);
            double vv = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            pi += vv * (yij.real() * c + yij.imag() * s);
            qi += vv * (yij.real() * s - yij.imag() * c);
        }
        p[static_cast<std::size_t>(i)] = pi;
        q[static_cast<std::size_t>(i)] = qi;
    }
}

}  // namespace

AdmittanceMatrix build_admittance(const GridCase& grid) {
    grid.validate();
    int n = grid.n();
    AdmittanceMatrix ybus;
    ybus.n = n;
    ybus.y.assign(static_cast<std::size_t>(n) * n, {0.0, 0.0});

    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        const Branch& br = grid.branches[k];
        if (!br.in_service) continue;
        if (br.resistance_r == 0.0 && br.reactance_x == 0.0)
            throw ValidationError("branch " + std::to_string(k) + " has zero impedance");
        int i = grid.bus_index(br.from_bus);
        int j = grid.bus_index(br.to_bus);
        std::complex<double> ys = 1.0 / std::complex<double>(br.resistance_r, br.reactance_x);
        std::complex<double> ysh(0.0, br.charging_b / 2.0);
        double a = br.tap_ratio;
        ybus.at(i, i) += ys / (a * a) + ysh;
        ybus.at(j, j) += ys + ysh;
        ybus.at(i, j) -= ys / a;
        ybus.at(j, i) -= ys / a;
    }
    for (int i = 0; i < n; ++i) {
        const Bus& bus = grid.buses[static_cast<std::size_t>(i)];
        ybus.at(i, i) += std::complex<double>(bus.shunt_g, bus.shunt_b);
    }
    return ybus;
}

PowerFlowSolution solve_newton_raphson(const GridCase& grid, double tol, int max_iter) {
    if (tol <= 0) throw ValidationError("power flow tolerance must be positive");
    grid.validate();
    AdmittanceMatrix ybus = build_admittance(grid);
    BusSets sets = classify(grid);
    int n = grid.n();
    double base = grid.base_mva;

    // scheduled net injections in p.u.
    std::vector<double> p_sched(static_cast<std::size_t>(n)), q_sched(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Bus& bus = grid.buses[static_cast<std::size_t>(i)];
        p_sched[static_cast<std::size_t>(i)] = (bus.gen_p - bus.load_p) / base;
        q_sched[static_cast<std::size_t>(i)] = (bus.gen_q - bus.load_q) / base;
    }

    // flat start
    std::vector<double> v(static_cast<std::size_t>(n), 1.0), th(static_cast<std::size_t>(n), 0.0);
    for (int i : sets.pv) v[static_cast<std::size_t>(i)] = grid.buses[static_cast<std::size_t>(i)].voltage_setpoint;
    v[static_cast<std::size_t>(sets.slack)] = grid.buses[static_cast<std::size_t>(sets.slack)].voltage_setpoint;

    int n_th = static_cast<int>(sets.non_slack.size());
    int n_v = static_cast<int>(sets.pq.size());
    int dim = n_th + n_v;

    PowerFlowSolution sol;
    sol.v_mag = v;
    sol.v_angle = th;

    std::vector<double> p_calc, q_calc;
    for (int iter = 1; iter <= max_iter; ++iter) {
        calc_injections(ybus, v, th, p_calc, q_calc);

        Eigen::VectorXd mismatch(dim);
        double max_mis = 0.0;
        for (int r = 0; r < n_th; ++r) {
            int i = sets.non_slack[static_cast<std::size_t>(r)];
            double d = p_sched[static_cast<std::size_t>(i)] - p_calc[static_cast<std::size_t>(i)];
            mismatch(r) = d;
            max_mis = std::max(max_mis, std::abs(d));
        }
        for (int r = 0; r < n_v; ++r) {
            int i = sets.pq[static_cast<std::size_t>(r)];
            double d = q_sched[static_cast<std::size_t>(i)] - q_calc[static_cast<std::size_t>(i)];
            mismatch(n_th + r) = d;
            max_mis = std::max(max_mis, std::abs(d));
        }

        sol.iterations = iter;
        sol.max_mismatch = max_mis * base;
        if (max_mis <= tol) {
            sol.converged = true;
            break;
        }
        if (iter == max_iter) {
            sol.diagnostic = "iteration limit reached";
            break;
        }

        // polar Jacobian: [dP/dth dP/dV; dQ/dth dQ/dV], dV columns for PQ only
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
        for (int r = 0; r < n_th; ++r) {
            int i = sets.non_slack[static_cast<std::size_t>(r)];
            double vi = v[static_cast<std::size_t>(i)];
            for (int c = 0; c < n_th; ++c) {
                int j = sets.non_slack[static_cast<std::size_t>(c)];
                const auto& yij = ybus.at(i, j);
                double vj = v[static_cast<std::size_t>(j)];
                if (i == j) {
                    jac(r, c) = -q_calc[static_cast<std::size_t>(i)] - yij.imag() * vi * vi;
                } else {
                    double dth = th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)];
                    jac(r, c) = vi * vj * (yij.real() * std::sin(dth) - yij.imag() * std::cos(dth));
                }
            }
            for (int c = 0; c < n_v; ++c) {
                int j = sets.pq[static_cast<std::size_t>(c)];
                const auto& yij = ybus.at(i, j);
                double vj = v[static_cast<std::size_t>(j)];
                if (i == j) {
                    jac(r, n_th + c) = p_calc[static_cast<std::size_t>(i)] / vi + yij.real() * vi;
                } else {
                    double dth = th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)];
                    jac(r, n_th + c) = vi * (yij.real() * std::cos(dth) + yij.imag() * std::sin(dth));
                    (void)vj;
                }
            }
        }
        for (int r = 0; r < n_v; ++r) {
            int i = sets.pq[static_cast<std::size_t>(r)];
            double vi = v[static_cast<std::size_t>(i)];
            for (int c = 0; c < n_th; ++c) {
                int j = sets.non_slack[static_cast<std::size_t>(c)];
                const auto& yij = ybus.at(i, j);
                double vj = v[static_cast<std::size_t>(j)];
                if (i == j) {
                    jac(n_th + r, c) = p_calc[static_cast<std::size_t>(i)] - yij.real() * vi * vi;
                } else {
                    double dth = th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)];
                    jac(n_th + r, c) =
                        -vi * vj * (yij.real() * std::cos(dth) + yij.imag() * std::sin(dth));
                }
            }
            for (int c = 0; c < n_v; ++c) {
                int j = sets.pq[static_cast<std::size_t>(c)];
                const auto& yij = ybus.at(i, j);
                if (i == j) {
                    jac(n_th + r, n_th + c) = q_calc[static_cast<std::size_t>(i)] / vi - yij.imag() * vi;
                } else {
                    double dth = th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)];
                    jac(n_th + r, n_th + c) =
                        vi * (yij.real() * std::sin(dth) - yij.imag() * std::cos(dth));
                }
            }
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        Eigen::VectorXd dx = lu.solve(mismatch);
        if (!dx.allFinite()) {
            sol.diagnostic = "singular Jacobian";
            break;
        }
        for (int r = 0; r < n_th; ++r)
            th[static_cast<std::size_t>(sets.non_slack[static_cast<std::size_t>(r)])] += dx(r);
        for (int r = 0; r < n_v; ++r) {
            std::size_t i = static_cast<std::size_t>(sets.pq[static_cast<std::size_t>(r)]);
            v[i] += dx(n_th + r);
            if (v[i] <= 0 || !std::isfinite(v[i])) {
                sol.diagnostic = "voltage iterate left the solvable region";
                sol.converged = false;
                sol.v_mag = v;
                sol.v_angle = th;
                return sol;
            }
        }
    }

    sol.v_mag = v;
    sol.v_angle = th;
    calc_injections(ybus, v, th, p_calc, q_calc);
    sol.p_injection.resize(static_cast<std::size_t>(n));
    sol.q_injection.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        sol.p_injection[static_cast<std::size_t>(i)] = p_calc[static_cast<std::size_t>(i)] * base;
        sol.q_injection[static_cast<std::size_t>(i)] = q_calc[static_cast<std::size_t>(i)] * base;
    }
    return sol;
}

GridCase apply_transfer(const GridCase& grid, const TransferSweepParams& params,
                        double transfer_mw) {
    GridCase stressed = grid;
    if (transfer_mw == 0.0) return stressed;

    double source_total = 0.0, sink_total = 0.0;
    for (int id : params.source_buses)
        source_total += grid.buses[static_cast<std::size_t>(grid.bus_index(id))].gen_p;
    for (int id : params.sink_buses)
        sink_total += grid.buses[static_cast<std::size_t>(grid.bus_index(id))].load_p;

    for (int id : params.source_buses) {
        Bus& bus = stressed.buses[static_cast<std::size_t>(stressed.bus_index(id))];
        double share = source_total > 0 ? bus.gen_p / source_total
                                        : 1.0 / static_cast<double>(params.source_buses.size());
        bus.gen_p += transfer_mw * share;
    }
    for (int id : params.sink_buses) {
        Bus& bus = stressed.buses[static_cast<std::size_t>(stressed.bus_index(id))];
        double share = sink_total > 0 ? bus.load_p / sink_total
                                      : 1.0 / static_cast<double>(params.sink_buses.size());
        double added = transfer_mw * share;
        if (bus.load_p != 0.0) {
            double factor = (bus.load_p + added) / bus.load_p;
            bus.load_q *= factor;  // constant power factor
        }
        bus.load_p += added;
    }
    return stressed;
}

TransferSweepResult pv_transfer_sweep(const GridCase& grid, const TransferSweepParams& params,
                                      const VoltageBand& band) {
    if (params.increment <= 0) throw ValidationError("transfer increment must be positive");
    if (params.max_transfer < params.initial_transfer)
        throw ValidationError("max_transfer below initial_transfer");
    if (params.source_buses.empty() || params.sink_buses.empty())
        throw ValidationError("transfer sweep needs non-empty source and sink sets");
    for (int s : params.source_buses)
        for (int t : params.sink_buses)
            if (s == t) throw ValidationError("source and sink sets overlap");

    double tol = params.mismatch_tol / grid.base_mva;
    TransferSweepResult result;
    for (double transfer = params.initial_transfer; transfer <= params.max_transfer + 1e-9;
         transfer += params.increment) {
        ++result.steps_attempted;
        GridCase stressed = apply_transfer(grid, params, transfer);
        PowerFlowSolution sol = solve_newton_raphson(stressed, tol);
        if (!sol.converged) {
            result.termination = "not_converged";
            if (result.points.empty())
                result.termination += ": first step at " + std::to_string(transfer) + " MW (" +
                                      (sol.diagnostic.empty() ? "no solution" : sol.diagnostic) + ")";
            return result;
        }
        bool violated = false;
        for (double vm : sol.v_mag) violated = violated || vm < band.v_min || vm > band.v_max;
        result.points.push_back(std::move(sol));
        if (violated) {
            result.termination = "voltage_violation";
            return result;
        }
    }
    result.termination = "max_transfer";
    return result;
}

}  // namespace gridsa
