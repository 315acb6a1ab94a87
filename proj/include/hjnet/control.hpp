#ifndef HJNET_CONTROL_HPP
#define HJNET_CONTROL_HPP

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hjnet/hamiltonian.hpp"
#include "hjnet/network.hpp"
#include "hjnet/solver.hpp"

namespace hjnet {

struct ControlSample {
    double velocity = 0.0;  // b
    double cost = 0.0;      // l
};

// Finite sample of a branch control set. Velocities must take both signs so
// the generated Hamiltonian is coercive.
struct BranchControl {
    std::vector<ControlSample> samples;
};

// Controls applicable while sitting at the junction point; only zero-velocity
// samples contribute to the vertex flux limit.
struct VertexControl {
    std::vector<ControlSample> samples;
};

struct ControlProblem {
    std::shared_ptr<const Network> junction;  // one vertex
    std::vector<BranchControl> branch_controls;
    VertexControl vertex_control;
    std::function<double(NetworkPoint)> initial_cost;
};

// H(p) = max over samples of (b*p - l); convex piecewise linear, coercive.
QuasiConvexHamiltonian hamiltonian_from_controls(const BranchControl& bc,
                                                 double search_bound = kDefaultSearchBound);

// Nonincreasing envelope built directly from the b <= 0 samples plus a
// synthetic zero-velocity sample realizing the envelope floor.
std::function<double(double)> h_minus_from_controls(const BranchControl& bc,
                                                    double search_bound = kDefaultSearchBound);

// max(H0, A0): H0 from zero-velocity vertex samples (or -inf when none), A0
// from the control-generated branch Hamiltonians.
double vertex_flux_limit(const ControlProblem& problem);

struct TangentialHamiltonians {
    std::optional<double> h_t;      // stationary mixtures
    std::optional<double> h_t_reg;  // regular stationary mixtures (b1 <= 0 <= b2)
};

// Both controls are expressed in the real-line frame: side 1 occupies the
// negative half-line, side 2 the positive one.
TangentialHamiltonians tangential_hamiltonians(const BranchControl& side1,
                                               const BranchControl& side2);

// Backward semi-Lagrangian dynamic programming for the value function: at
// each slice u(t+dt,x) = min over samples of u(t, x - b dt) + l dt, with a
// vertex-crossing split and dwell controls at the junction point. The
// regular_dynamics_only flag restricts vertex stationarity to regular pairs.
GridFunction value_function_dp(const ControlProblem& problem, double T, int time_steps,
                               const Grid& grid, bool regular_dynamics_only = false,
                               const GridFunction* restart = nullptr);

struct ScheduleEntry {
    int branch = -1;  // -1 selects a vertex control
    int sample = 0;
    double duration = 0.0;
};

// Integrates the running cost along the trajectory induced by a
// piecewise-constant control schedule (explicit Euler on the position).
double trajectory_cost(const ControlProblem& problem, const std::vector<ScheduleEntry>& schedule,
                       const NetworkPoint& start);

}  // namespace hjnet

#endif
