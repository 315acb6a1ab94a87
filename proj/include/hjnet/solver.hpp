#ifndef HJNET_SOLVER_HPP
#define HJNET_SOLVER_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hjnet/flux_limiter.hpp"
#include "hjnet/hamiltonian.hpp"
#include "hjnet/network.hpp"

namespace hjnet {

// Vertex condition: a flux limiter, optionally augmented by a general
// monotone junction function (the relaxed operator folds both into one max).
struct VertexCondition {
    FluxLimiter limiter = FluxLimiter::minus_infinity();
    std::optional<JunctionFunction> general;
};

struct SchemeConfig {
    double cfl_safety = 0.5;
    VertexCondition default_vertex;
    std::map<int, VertexCondition> per_vertex;  // by vertex index

    const VertexCondition& vertex_condition(int v) const {
        auto it = per_vertex.find(v);
        return it == per_vertex.end() ? default_vertex : it->second;
    }
};

// Uniform discretization of a network. Vertex nodes are shared unknowns;
// interior nodes run along each edge; truncated half-lines end in a boundary
// node closed by the state-constraint condition.
class Grid {
public:
    Grid(std::shared_ptr<const Network> net, double dx, double default_truncation = 8.0,
         const std::map<int, double>& truncation_per_edge = {});

    const Network& network() const { return *net_; }
    std::shared_ptr<const Network> network_ptr() const { return net_; }
    int node_count() const { return node_count_; }
    double dx() const { return dx_; }

    struct EdgeLayout {
        int cells = 0;            // >= 2
        double dx = 0.0;          // per-edge spacing (== requested when divisible)
        double length = 0.0;      // truncated length for half-lines
        int first_interior = -1;  // global index of node at offset dx
        int tail_node = -1;       // vertex node at offset 0
        int head_node = -1;       // vertex node or truncation node at offset length
        bool head_truncated = false;
        double drift = 0.0;       // slope offset added to every finite difference
    };
    const EdgeLayout& edge_layout(int e) const { return layout_.at(e); }
    int vertex_node(int v) const { return v; }

    // node index of offset k*dx_e on edge e (k = 0..cells)
    int edge_node(int e, int k) const;
    NetworkPoint node_point(int node) const { return points_.at(node); }

    void set_drift(int e, double slope) { layout_.at(e).drift = slope; }

    std::vector<double> sample(const std::function<double(NetworkPoint)>& f) const;
    // piecewise-linear interpolation along an edge
    double interpolate(const std::vector<double>& values, const NetworkPoint& p) const;

private:
    std::shared_ptr<const Network> net_;
    double dx_;
    int node_count_ = 0;
    std::vector<EdgeLayout> layout_;
    std::vector<NetworkPoint> points_;
};

struct GridFunction {
    std::vector<double> values;
    double time = 0.0;
};

// Godunov numerical flux: max(H^+(left slope), H^-(right slope)).
double godunov_flux(const QuasiConvexHamiltonian& h, double left_slope, double right_slope);

// Vertex flux from one-sided slopes pointing away from the vertex, one per
// incident edge slot in partition order (E_n^- then E_n^+).
double junction_flux(const Network& net, int vertex, const std::vector<double>& away_slopes,
                     const VertexCondition& cond, const std::vector<QuasiConvexHamiltonian>& hs);

// estimated slope-Lipschitz bound of the scheme on the current state
double scheme_lipschitz(const GridFunction& state, const Grid& grid,
                        const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg);

double max_stable_dt(const GridFunction& state, const Grid& grid,
                     const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg);

// one explicit Euler step of the monotone scheme; throws CflError when dt is
// too large for the current state
GridFunction step(const GridFunction& state, double dt, const Grid& grid,
                  const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg);

struct Snapshot {
    double time;
    GridFunction state;
};

GridFunction solve(const std::function<double(NetworkPoint)>& u0, double T, const Grid& grid,
                   const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg,
                   const std::vector<double>& snapshot_times = {},
                   std::vector<Snapshot>* snapshots = nullptr);

// stationary problem alpha*u + H(x,u_x) = 0 by pseudo-time iteration with an
// exact solve of the constant mode; stops at residual max-norm < 1e-8
GridFunction solve_stationary(const Grid& grid, const std::vector<QuasiConvexHamiltonian>& hs,
                              const SchemeConfig& cfg, double alpha,
                              std::vector<double>* residual_log = nullptr,
                              const GridFunction* warm_start = nullptr);

struct ReductionResult {
    GridFunction with_general;  // relaxed general-F vertex operator
    GridFunction with_limiter;  // equivalent flux limiter A_F
    double flux_limit;          // A_F
    double sup_gap;             // over the comparison region
};

// Solves twice (general monotone F vs its reduced limiter A_F) and reports
// the sup-norm gap inside distance `region_radius` of the vertex.
ReductionResult reduction_experiment(const JunctionFunction& F,
                                     const std::vector<QuasiConvexHamiltonian>& hs,
                                     const std::function<double(NetworkPoint)>& u0, double T,
                                     const Grid& grid, const SchemeConfig& base_cfg,
                                     double region_radius);

}  // namespace hjnet

#endif
