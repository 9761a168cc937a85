#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "memnet/errors.hpp"
#include "memnet/memristor.hpp"
#include "memnet/network.hpp"
#include "memnet/signals.hpp"

namespace memnet {

/// One signal per External node, nothing else.
using DriveAssignment = std::map<NodeId, Signal>;

[[nodiscard]] inline std::vector<Violation> validate_drives(const Network& network,
                                                            const DriveAssignment& drives) {
    std::vector<Violation> out;
    for (const auto& node : network.nodes) {
        if (node.role == NodeRole::External && !drives.contains(node.id)) {
            out.push_back({Violation::Rule::MissingDrive,
                           "external node " + std::to_string(node.id) + " has no drive signal"});
        }
    }
    for (const auto& [id, signal] : drives) {
        const auto idx = network.index_of(id);
        if (!idx || network.nodes[*idx].role != NodeRole::External) {
            out.push_back({Violation::Rule::UnexpectedDrive,
                           "drive given for node " + std::to_string(id) +
                               ", which is not an external node"});
        } else if (!(signal.frequency >= 0.0)) {
            out.push_back({Violation::Rule::UnexpectedDrive,
                           "drive for node " + std::to_string(id) + " has negative frequency"});
        }
    }
    return out;
}

struct SimulationConfig {
    double dt = 0.006;              // s
    std::size_t n_steps = 500;
    double fp_tolerance = 1e-9;     // max relative resistance change between iterates
    int fp_max_iterations = 100;
    double kcl_tolerance = 1e-8;    // relative current residual
    double kcl_floor = 1e-12;       // A, lower bound on the residual scale

    [[nodiscard]] bool valid() const {
        return dt > 0.0 && std::isfinite(dt) && n_steps >= 1 && fp_tolerance > 0.0 &&
               fp_max_iterations >= 1 && kcl_tolerance > 0.0 && kcl_floor > 0.0;
    }
};

/// Network state at one instant. Vectors follow the network's node and link order.
struct NetworkState {
    double t = 0.0;
    std::vector<double> resistances;
    std::vector<double> node_voltages;
};

/// Nodal analysis for a fixed topology. Assembles the conductance matrix over
/// the internal nodes and solves for their voltages given the fixed ones.
class NodalSolver {
public:
    explicit NodalSolver(const Network& network) {
        slot_.assign(network.nodes.size(), -1);
        for (std::size_t i = 0; i < network.nodes.size(); ++i) {
            if (network.nodes[i].role == NodeRole::Internal) {
                slot_[i] = static_cast<int>(internal_.size());
                internal_.push_back(i);
            }
        }
        for (const auto& link : network.links) {
            const auto a = network.index_of(link.from);
            const auto b = network.index_of(link.to);
            if (!a || !b) {
                throw ValidationError({{Violation::Rule::MissingEndpoint,
                                        "link " + std::to_string(link.from) + "->" +
                                            std::to_string(link.to) + " has a missing endpoint"}});
            }
            ends_.emplace_back(*a, *b);
        }
    }

    [[nodiscard]] std::size_t internal_count() const { return internal_.size(); }
    [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>& link_ends() const {
        return ends_;
    }

    /// Overwrites the internal entries of `voltages`; fixed entries are read as boundary values.
    void solve(std::span<const double> resistances, std::span<double> voltages) const {
        const auto n = static_cast<Eigen::Index>(internal_.size());
        if (n == 0) return;
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k < ends_.size(); ++k) {
            const double c = 1.0 / resistances[k];
            const auto [a, b] = ends_[k];
            const int sa = slot_[a];
            const int sb = slot_[b];
            if (sa >= 0) {
                g(sa, sa) += c;
                if (sb >= 0) {
                    g(sa, sb) -= c;
                } else {
                    rhs(sa) += c * voltages[b];
                }
            }
            if (sb >= 0) {
                g(sb, sb) += c;
                if (sa >= 0) {
                    g(sb, sa) -= c;
                } else {
                    rhs(sb) += c * voltages[a];
                }
            }
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
        if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13)) {
            throw SingularSystemError(
                "internal-node conductance matrix is singular (an internal component has no path "
                "to a fixed-voltage node)");
        }
        const Eigen::VectorXd v = ldlt.solve(rhs);
        for (Eigen::Index i = 0; i < n; ++i) voltages[internal_[i]] = v(i);
    }

private:
    std::vector<int> slot_;                 // node index -> internal row, -1 for fixed nodes
    std::vector<std::size_t> internal_;     // internal row -> node index
    std::vector<std::pair<std::size_t, std::size_t>> ends_;
};

/// Internal-node voltages for the given resistances and fixed-node voltages.
/// `boundary` must cover every External and Grounded node.
[[nodiscard]] inline std::map<NodeId, double> solve_node_voltages(
    const Network& network, std::span<const double> resistances,
    const std::map<NodeId, double>& boundary) {
    std::vector<double> v(network.nodes.size(), 0.0);
    for (std::size_t i = 0; i < network.nodes.size(); ++i) {
        const auto& node = network.nodes[i];
        if (!is_fixed(node.role)) continue;
        auto it = boundary.find(node.id);
        if (it == boundary.end()) {
            throw ValidationError({{Violation::Rule::MissingDrive,
                                    "no boundary voltage for node " + std::to_string(node.id)}});
        }
        v[i] = it->second;
    }
    NodalSolver(network).solve(resistances, v);
    std::map<NodeId, double> out;
    for (std::size_t i = 0; i < network.nodes.size(); ++i) {
        if (network.nodes[i].role == NodeRole::Internal) out[network.nodes[i].id] = v[i];
    }
    return out;
}

/// Kirchhoff bookkeeping for one state.
struct KclReport {
    double max_relative_residual = 0.0;  // worst internal node
    double injected = 0.0;               // A, net current leaving External nodes into the network
    double drained = 0.0;                // A, net current entering Grounded nodes
    double balance_relative = 0.0;       // |injected - drained| / max(sum |I_link|, floor)
};

[[nodiscard]] inline KclReport kcl_report(const Network& network, const NetworkState& state,
                                          double floor = 1e-12) {
    const std::size_t n = network.nodes.size();
    std::vector<double> net(n, 0.0);   // current leaving each node through its links
    std::vector<double> mag(n, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < network.links.size(); ++k) {
        const auto a = *network.index_of(network.links[k].from);
        const auto b = *network.index_of(network.links[k].to);
        const double i = (state.node_voltages[a] - state.node_voltages[b]) / state.resistances[k];
        net[a] += i;
        net[b] -= i;
        mag[a] += std::abs(i);
        mag[b] += std::abs(i);
        total += std::abs(i);
    }
    KclReport r;
    for (std::size_t i = 0; i < n; ++i) {
        switch (network.nodes[i].role) {
            case NodeRole::Internal:
                r.max_relative_residual =
                    std::max(r.max_relative_residual, std::abs(net[i]) / std::max(mag[i], floor));
                break;
            case NodeRole::External: r.injected += net[i]; break;
            case NodeRole::Grounded: r.drained -= net[i]; break;
        }
    }
    r.balance_relative = std::abs(r.injected - r.drained) / std::max(total, floor);
    return r;
}

/// Full time series of a run. Outer index is node or link (network order),
/// inner index is the sample; sample 0 is the t = 0 state.
struct SimulationTrace {
    std::vector<NodeId> node_ids;
    std::vector<double> times;
    std::vector<std::vector<double>> node_voltages;
    std::vector<std::vector<double>> resistances;
    std::vector<std::vector<double>> currents;
    std::vector<std::vector<double>> drops;

    [[nodiscard]] std::size_t samples() const { return times.size(); }

    [[nodiscard]] const std::vector<double>& voltage_of(NodeId id) const {
        for (std::size_t i = 0; i < node_ids.size(); ++i) {
            if (node_ids[i] == id) return node_voltages[i];
        }
        throw UsageError("trace has no node " + std::to_string(id));
    }
};

/// Implicit Euler integrator for the coupled nodal / resistance system.
///
/// Each step solves R' = clamp(R + dt * f(V_M(R'))) with V_M taken from the
/// nodal solve at the new time, by fixed-point iteration on R. Clamping
/// happens inside the loop so the converged state respects the hard limits.
class Simulator {
public:
    Simulator(const Network& network, DriveAssignment drives, SimulationConfig config)
        : network_(network), drives_(std::move(drives)), config_(config), solver_(network) {
        require_valid(network_);
        auto violations = validate_drives(network_, drives_);
        if (!violations.empty()) throw ValidationError(std::move(violations));
        if (!config_.valid()) {
            throw UsageError(
                "simulation config needs dt > 0, n_steps >= 1, fp_tolerance > 0, "
                "fp_max_iterations >= 1");
        }
    }

    [[nodiscard]] const Network& network() const { return network_; }
    [[nodiscard]] const SimulationConfig& config() const { return config_; }

    /// Consistent start: R = r_init, internal voltages solved at the t = 0 drive values.
    [[nodiscard]] NetworkState initial_state() const {
        NetworkState s;
        s.t = 0.0;
        for (const auto& link : network_.links) s.resistances.push_back(link.params.r_init);
        s.node_voltages = boundary_at(0.0);
        solver_.solve(s.resistances, s.node_voltages);
        return s;
    }

    /// Iterations used by the most recent step().
    [[nodiscard]] int last_iterations() const { return last_iterations_; }

    [[nodiscard]] NetworkState step(const NetworkState& state, double t_next) {
        const double dt = t_next - state.t;
        const auto& links = network_.links;
        const auto& ends = solver_.link_ends();

        NetworkState next;
        next.t = t_next;
        next.node_voltages = boundary_at(t_next);
        next.resistances = state.resistances;
        std::vector<double> candidate(links.size());

        double change = 0.0;
        for (int iter = 1; iter <= config_.fp_max_iterations; ++iter) {
            solver_.solve(next.resistances, next.node_voltages);
            change = 0.0;
            for (std::size_t k = 0; k < links.size(); ++k) {
                const auto& p = links[k].params;
                const double v_m = next.node_voltages[ends[k].first] -
                                   next.node_voltages[ends[k].second];
                candidate[k] = clamp_resistance(p, state.resistances[k] + dt * rate(p, v_m));
                change = std::max(change, std::abs(candidate[k] - next.resistances[k]) /
                                              next.resistances[k]);
            }
            next.resistances.swap(candidate);
            if (change <= config_.fp_tolerance) {
                last_iterations_ = iter;
                solver_.solve(next.resistances, next.node_voltages);
                return next;
            }
        }
        last_iterations_ = config_.fp_max_iterations;
        throw NonConvergenceError("implicit step to t = " + std::to_string(t_next) +
                                      " did not converge in " +
                                      std::to_string(config_.fp_max_iterations) +
                                      " iterations (relative change " + std::to_string(change) +
                                      ")",
                                  change);
    }

    [[nodiscard]] SimulationTrace run() {
        SimulationTrace trace;
        for (const auto& n : network_.nodes) trace.node_ids.push_back(n.id);
        trace.node_voltages.resize(network_.nodes.size());
        trace.resistances.resize(network_.links.size());
        trace.currents.resize(network_.links.size());
        trace.drops.resize(network_.links.size());
        const std::size_t samples = config_.n_steps + 1;
        trace.times.reserve(samples);
        for (auto* group : {&trace.node_voltages, &trace.resistances, &trace.currents,
                            &trace.drops}) {
            for (auto& series : *group) series.reserve(samples);
        }

        NetworkState state = initial_state();
        record(trace, state, 0);
        for (std::size_t n = 1; n <= config_.n_steps; ++n) {
            try {
                state = step(state, static_cast<double>(n) * config_.dt);
            } catch (const NonConvergenceError& e) {
                throw NonConvergenceError("step " + std::to_string(n) + ": " + e.what(),
                                          e.residual());
            } catch (const SingularSystemError& e) {
                throw SingularSystemError("step " + std::to_string(n) + ": " + e.what());
            }
            record(trace, state, n);
        }
        return trace;
    }

private:
    [[nodiscard]] std::vector<double> boundary_at(double t) const {
        std::vector<double> v(network_.nodes.size(), 0.0);
        for (std::size_t i = 0; i < network_.nodes.size(); ++i) {
            const auto& node = network_.nodes[i];
            if (node.role == NodeRole::External) v[i] = evaluate(drives_.at(node.id), t);
        }
        return v;
    }

    void record(SimulationTrace& trace, const NetworkState& state, std::size_t n) const {
        const auto kcl = kcl_report(network_, state, config_.kcl_floor);
        if (kcl.max_relative_residual > config_.kcl_tolerance ||
            kcl.balance_relative > config_.kcl_tolerance) {
            throw NumericalError("step " + std::to_string(n) +
                                 ": Kirchhoff residual exceeds tolerance (node " +
                                 std::to_string(kcl.max_relative_residual) + ", balance " +
                                 std::to_string(kcl.balance_relative) + ")");
        }
        trace.times.push_back(state.t);
        for (std::size_t i = 0; i < state.node_voltages.size(); ++i) {
            trace.node_voltages[i].push_back(state.node_voltages[i]);
        }
        const auto& ends = solver_.link_ends();
        for (std::size_t k = 0; k < state.resistances.size(); ++k) {
            const double drop =
                state.node_voltages[ends[k].first] - state.node_voltages[ends[k].second];
            trace.resistances[k].push_back(state.resistances[k]);
            trace.drops[k].push_back(drop);
            trace.currents[k].push_back(drop / state.resistances[k]);
        }
    }

    Network network_;
    DriveAssignment drives_;
    SimulationConfig config_;
    NodalSolver solver_;
    int last_iterations_ = 0;
};

[[nodiscard]] inline NetworkState step_implicit_euler(const Network& network,
                                                      const NetworkState& state,
                                                      const DriveAssignment& drives,
                                                      const SimulationConfig& config) {
    Simulator sim(network, drives, config);
    return sim.step(state, state.t + config.dt);
}

[[nodiscard]] inline SimulationTrace simulate(const Network& network,
                                              const DriveAssignment& drives,
                                              const SimulationConfig& config) {
    return Simulator(network, drives, config).run();
}

}  // namespace memnet
