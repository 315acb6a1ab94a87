#include "hjnet/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjnet/errors.hpp"
#include "hjnet/flux_limiter.hpp"

namespace hjnet {

namespace {

void validate_branch(const BranchControl& bc) {
    if (bc.samples.empty()) throw ConfigError("branch control set is empty");
    bool has_neg = false, has_pos = false;
    for (const auto& s : bc.samples) {
        if (!std::isfinite(s.velocity) || !std::isfinite(s.cost))
            throw ConfigError("branch control sample is not finite");
        has_neg = has_neg || s.velocity < 0.0;
        has_pos = has_pos || s.velocity > 0.0;
    }
    if (!has_neg || !has_pos)
        throw ConfigError("branch velocities are one-signed: generated Hamiltonian not coercive");
}

double sup_affine(const std::vector<ControlSample>& samples, double p) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) m = std::max(m, s.velocity * p - s.cost);
    return m;
}

}  // namespace

QuasiConvexHamiltonian hamiltonian_from_controls(const BranchControl& bc, double search_bound) {
    validate_branch(bc);
    auto samples = std::make_shared<std::vector<ControlSample>>(bc.samples);
    return QuasiConvexHamiltonian::from_function(
        [samples](double p) { return sup_affine(*samples, p); }, search_bound, std::nullopt,
        "controls");
}

std::function<double(double)> h_minus_from_controls(const BranchControl& bc,
                                                    double search_bound) {
    validate_branch(bc);
    auto h = hamiltonian_from_controls(bc, search_bound);
    auto down = std::make_shared<std::vector<ControlSample>>();
    for (const auto& s : bc.samples)
        if (s.velocity <= 0.0) down->push_back(s);
    // synthetic zero-velocity sample supplies the envelope floor min H when
    // the sample set skips b = 0
    down->push_back({0.0, -h.min_value()});
    return [down](double p) { return sup_affine(*down, p); };
}

double vertex_flux_limit(const ControlProblem& problem) {
    if (problem.branch_controls.empty()) throw ConfigError("control problem has no branches");
    std::vector<QuasiConvexHamiltonian> hs;
    hs.reserve(problem.branch_controls.size());
    for (const auto& bc : problem.branch_controls) hs.push_back(hamiltonian_from_controls(bc));
    double a0 = minimal_limiter(hs);
    double h0 = -std::numeric_limits<double>::infinity();
    for (const auto& s : problem.vertex_control.samples)
        if (s.velocity == 0.0) h0 = std::max(h0, -s.cost);
    return std::max(h0, a0);
}

TangentialHamiltonians tangential_hamiltonians(const BranchControl& side1,
                                               const BranchControl& side2) {
    double best = -std::numeric_limits<double>::infinity();
    double best_reg = best;
    bool found = false, found_reg = false;

    auto consider = [&](double value, bool regular) {
        found = true;
        best = std::max(best, value);
        if (regular) {
            found_reg = true;
            best_reg = std::max(best_reg, value);
        }
    };

    for (const auto& s1 : side1.samples)
        for (const auto& s2 : side2.samples) {
            const double b1 = s1.velocity, b2 = s2.velocity;
            const bool regular = (b1 <= 0.0 && b2 >= 0.0);
            if (b1 == 0.0 && b2 == 0.0) {
                consider(-s1.cost, regular);
                consider(-s2.cost, regular);
            } else if (b1 == 0.0) {
                consider(-s1.cost, regular);  // mu = 1
            } else if (b2 == 0.0) {
                consider(-s2.cost, regular);  // mu = 0
            } else if (b1 * b2 < 0.0) {
                double mu = b2 / (b2 - b1);
                consider(-(mu * s1.cost + (1.0 - mu) * s2.cost), regular);
            }
        }

    TangentialHamiltonians out;
    if (found) out.h_t = best;
    if (found_reg) out.h_t_reg = best_reg;
    return out;
}

namespace {

// smallest cost rate achievable while staying at the junction point
double vertex_dwell_rate(const ControlProblem& problem, bool regular_only) {
    double rate = std::numeric_limits<double>::infinity();
    for (const auto& s : problem.vertex_control.samples)
        if (s.velocity == 0.0) rate = std::min(rate, s.cost);
    for (const auto& bc : problem.branch_controls)
        for (const auto& s : bc.samples)
            if (s.velocity == 0.0) rate = std::min(rate, s.cost);

    // stationary mixtures of two branch controls, real-line semantics
    // (only meaningful for two-branch junctions)
    if (problem.branch_controls.size() == 2) {
        const auto& bc1 = problem.branch_controls[0];
        const auto& bc2 = problem.branch_controls[1];
        for (const auto& s1 : bc1.samples)
            for (const auto& s2 : bc2.samples) {
                double v1 = -s1.velocity;  // away-frame -> real line
                double v2 = s2.velocity;
                bool regular = (v1 <= 0.0 && v2 >= 0.0);
                if (regular_only && !regular) continue;
                double mu;
                if (v1 == 0.0 && v2 == 0.0)
                    mu = 1.0;
                else if (v1 == 0.0)
                    mu = 1.0;
                else if (v2 == 0.0)
                    mu = 0.0;
                else if (v1 * v2 < 0.0)
                    mu = v2 / (v2 - v1);
                else
                    continue;
                rate = std::min(rate, mu * s1.cost + (1.0 - mu) * s2.cost);
            }
    }
    return rate;
}

}  // namespace

GridFunction value_function_dp(const ControlProblem& problem, double T, int time_steps,
                               const Grid& grid, bool regular_dynamics_only,
                               const GridFunction* restart) {
    if (time_steps < 1) throw ConfigError("value function: need at least one time step");
    const Network& net = grid.network();
    if (net.vertices().size() != 1)
        throw ConfigError("value function: the dynamic program runs on a single junction");
    if (problem.branch_controls.size() != net.edges().size())
        throw ConfigError("value function: one branch control set per edge required");
    for (const auto& bc : problem.branch_controls) validate_branch(bc);

    const double dt = T / time_steps;
    double bmax = 0.0;
    for (const auto& bc : problem.branch_controls)
        for (const auto& s : bc.samples) bmax = std::max(bmax, std::abs(s.velocity));
    double dx_min = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < net.edges().size(); ++e)
        dx_min = std::min(dx_min, grid.edge_layout(static_cast<int>(e)).dx);
    if (bmax * dt > dx_min * (1.0 + 1e-12))
        throw ConfigError("value function: b*dt exceeds dx, refine the time grid");

    const double dwell = vertex_dwell_rate(problem, regular_dynamics_only);

    GridFunction u;
    if (restart) {
        u = *restart;
    } else {
        u.values = grid.sample(problem.initial_cost);
        u.time = 0.0;
    }

    GridFunction next = u;
    for (int step_i = 0; step_i < time_steps; ++step_i) {
        // vertex node
        {
            double best = std::numeric_limits<double>::infinity();
            if (std::isfinite(dwell)) best = u.values[0] + dwell * dt;
            for (size_t e = 0; e < problem.branch_controls.size(); ++e)
                for (const auto& s : problem.branch_controls[e].samples) {
                    if (s.velocity >= 0.0) continue;  // must arrive moving toward the vertex
                    double pred = -s.velocity * dt;
                    double val =
                        grid.interpolate(u.values, {static_cast<int>(e), pred}) + s.cost * dt;
                    best = std::min(best, val);
                }
            next.values[0] = best;
        }
        // branch nodes
        for (size_t e = 0; e < net.edges().size(); ++e) {
            const auto& L = grid.edge_layout(static_cast<int>(e));
            const auto& bc = problem.branch_controls[e];
            int last = L.head_truncated ? L.cells : L.cells - 1;
            for (int k = 1; k <= last; ++k) {
                int node = grid.edge_node(static_cast<int>(e), k);
                double a = k * L.dx;
                double best = std::numeric_limits<double>::infinity();
                for (const auto& s : bc.samples) {
                    double pred = a - s.velocity * dt;
                    double val;
                    if (pred >= 0.0) {
                        pred = std::min(pred, L.length);
                        val = grid.interpolate(u.values, {static_cast<int>(e), pred}) +
                              s.cost * dt;
                    } else {
                        // crossed the junction point: split the step there
                        double tau = a / s.velocity;
                        double rest = dt - tau;
                        double hold = std::isfinite(dwell) ? dwell : s.cost;
                        val = u.values[0] + s.cost * tau + hold * rest;
                    }
                    best = std::min(best, val);
                }
                next.values[node] = best;
            }
        }
        std::swap(u.values, next.values);
        u.time += dt;
    }
    return u;
}

double trajectory_cost(const ControlProblem& problem, const std::vector<ScheduleEntry>& schedule,
                       const NetworkPoint& start) {
    const Network& net = *problem.junction;
    if (net.vertices().size() != 1)
        throw ConfigError("trajectory cost: expected a single junction");
    NetworkPoint x = start;
    net.validate_point(x);
    double cost = problem.initial_cost(x);

    for (const auto& entry : schedule) {
        if (!(entry.duration >= 0.0)) throw ConfigError("trajectory: negative duration");
        if (entry.branch < 0) {
            const auto& vs = problem.vertex_control.samples;
            if (entry.sample < 0 || entry.sample >= static_cast<int>(vs.size()))
                throw ConfigError("trajectory: bad vertex sample index");
            if (x.offset > 1e-12) throw InfeasibleError("vertex control applied away from the vertex");
            if (vs[entry.sample].velocity != 0.0)
                throw InfeasibleError("vertex control must have zero velocity");
            cost += vs[entry.sample].cost * entry.duration;
            continue;
        }
        if (entry.branch >= static_cast<int>(problem.branch_controls.size()))
            throw ConfigError("trajectory: bad branch index");
        const auto& bs = problem.branch_controls[entry.branch].samples;
        if (entry.sample < 0 || entry.sample >= static_cast<int>(bs.size()))
            throw ConfigError("trajectory: bad branch sample index");
        const auto& s = bs[entry.sample];
        if (x.offset <= 1e-12) {
            if (s.velocity < 0.0)
                throw InfeasibleError("trajectory would leave the network at the vertex");
            x = NetworkPoint{entry.branch, 0.0};
        } else if (x.edge != entry.branch) {
            throw InfeasibleError("branch control applied on a different branch");
        }
        // explicit Euler with exact stop at the vertex
        int substeps = std::max(1, static_cast<int>(std::ceil(entry.duration / 1e-3)));
        double h = entry.duration / substeps;
        for (int k = 0; k < substeps; ++k) {
            double nx = x.offset + s.velocity * h;
            if (nx < 0.0) throw InfeasibleError("trajectory crossed the vertex mid-control");
            x.offset = nx;
            cost += s.cost * h;
        }
    }
    return cost;
}

}  // namespace hjnet
