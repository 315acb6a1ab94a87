#include "hjnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjnet/errors.hpp"

namespace hjnet {

Grid::Grid(std::shared_ptr<const Network> net, double dx, double default_truncation,
           const std::map<int, double>& truncation_per_edge)
    : net_(std::move(net)), dx_(dx) {
    if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
    const auto& edges = net_->edges();
    const int nv = static_cast<int>(net_->vertices().size());
    layout_.resize(edges.size());
    node_count_ = nv;
    points_.resize(nv);

    for (size_t e = 0; e < edges.size(); ++e) {
        auto& L = layout_[e];
        double len = edges[e].length;
        if (edges[e].is_half_line()) {
            auto it = truncation_per_edge.find(static_cast<int>(e));
            len = (it != truncation_per_edge.end()) ? it->second : default_truncation;
            if (!(len > 0.0)) throw ConfigError("half-line truncation must be positive");
            L.head_truncated = true;
        }
        L.cells = std::max<int>(2, static_cast<int>(std::llround(len / dx)));
        L.dx = len / L.cells;
        L.length = len;
        L.tail_node = edges[e].tail_vertex;
        L.first_interior = node_count_;
        node_count_ += L.cells - 1;
        if (L.head_truncated) {
            L.head_node = node_count_++;
        } else {
            L.head_node = edges[e].head_vertex;
        }
    }

    points_.resize(node_count_);
    for (int v = 0; v < nv; ++v) {
        const auto& vert = net_->vertices()[v];
        if (!vert.incoming_minus.empty()) {
            points_[v] = NetworkPoint{vert.incoming_minus.front(), 0.0};
        } else {
            int e = vert.incoming_plus.front();
            points_[v] = NetworkPoint{e, layout_[e].length};
        }
    }
    for (size_t e = 0; e < edges.size(); ++e) {
        const auto& L = layout_[e];
        for (int k = 1; k < L.cells; ++k)
            points_[L.first_interior + k - 1] = NetworkPoint{static_cast<int>(e), k * L.dx};
        if (L.head_truncated) points_[L.head_node] = NetworkPoint{static_cast<int>(e), L.length};
    }
}

int Grid::edge_node(int e, int k) const {
    const auto& L = layout_.at(e);
    if (k == 0) return L.tail_node;
    if (k == L.cells) return L.head_node;
    return L.first_interior + k - 1;
}

std::vector<double> Grid::sample(const std::function<double(NetworkPoint)>& f) const {
    std::vector<double> out(node_count_);
    for (int i = 0; i < node_count_; ++i) out[i] = f(points_[i]);
    return out;
}

double Grid::interpolate(const std::vector<double>& values, const NetworkPoint& p) const {
    const auto& L = layout_.at(p.edge);
    double pos = std::clamp(p.offset, 0.0, L.length) / L.dx;
    int k = std::min(static_cast<int>(pos), L.cells - 1);
    double w = pos - k;
    return (1.0 - w) * values[edge_node(p.edge, k)] + w * values[edge_node(p.edge, k + 1)];
}

double godunov_flux(const QuasiConvexHamiltonian& h, double left_slope, double right_slope) {
    return std::max(h.envelope_plus(left_slope), h.envelope_minus(right_slope));
}

double junction_flux(const Network& net, int vertex, const std::vector<double>& away_slopes,
                     const VertexCondition& cond, const std::vector<QuasiConvexHamiltonian>& hs) {
    const auto& v = net.vertices().at(vertex);
    size_t slots = v.incoming_minus.size() + v.incoming_plus.size();
    if (away_slopes.size() != slots)
        throw ConfigError("junction flux: one slope per incident edge required");
    double flux = -std::numeric_limits<double>::infinity();
    size_t s = 0;
    for (int e : v.incoming_minus) flux = std::max(flux, hs.at(e).envelope_minus(away_slopes[s++]));
    for (int e : v.incoming_plus) flux = std::max(flux, hs.at(e).envelope_plus(-away_slopes[s++]));
    if (cond.general) {
        if (cond.general->arity != static_cast<int>(slots))
            throw ConfigError("junction flux: general F arity mismatch");
        flux = std::max(flux, (*cond.general)(away_slopes));
    } else if (!cond.limiter.is_minus_infinity()) {
        flux = std::max(flux, cond.limiter.value());
    }
    return flux;
}

namespace {

std::vector<double> vertex_away_slopes(const GridFunction& state, const Grid& grid, int v) {
    const auto& vert = grid.network().vertices()[v];
    std::vector<double> s;
    s.reserve(vert.degree());
    for (int e : vert.incoming_minus) {
        const auto& L = grid.edge_layout(e);
        s.push_back((state.values[grid.edge_node(e, 1)] - state.values[v]) / L.dx + L.drift);
    }
    for (int e : vert.incoming_plus) {
        const auto& L = grid.edge_layout(e);
        double oriented =
            (state.values[v] - state.values[grid.edge_node(e, L.cells - 1)]) / L.dx + L.drift;
        s.push_back(-oriented);
    }
    return s;
}

// numerical Hamiltonian at every node
std::vector<double> assemble_fluxes(const GridFunction& state, const Grid& grid,
                                    const std::vector<QuasiConvexHamiltonian>& hs,
                                    const SchemeConfig& cfg) {
    const Network& net = grid.network();
    std::vector<double> flux(grid.node_count(), 0.0);

    for (size_t v = 0; v < net.vertices().size(); ++v) {
        auto slopes = vertex_away_slopes(state, grid, static_cast<int>(v));
        flux[v] = junction_flux(net, static_cast<int>(v), slopes,
                                cfg.vertex_condition(static_cast<int>(v)), hs);
    }
    for (size_t e = 0; e < net.edges().size(); ++e) {
        const auto& L = grid.edge_layout(static_cast<int>(e));
        const auto& h = hs.at(e);
        for (int k = 1; k < L.cells; ++k) {
            int node = grid.edge_node(static_cast<int>(e), k);
            double pl = (state.values[node] - state.values[grid.edge_node(e, k - 1)]) / L.dx +
                        L.drift;
            double pr = (state.values[grid.edge_node(e, k + 1)] - state.values[node]) / L.dx +
                        L.drift;
            flux[node] = godunov_flux(h, pl, pr);
        }
        if (L.head_truncated) {
            double pl = (state.values[L.head_node] -
                         state.values[grid.edge_node(static_cast<int>(e), L.cells - 1)]) /
                            L.dx +
                        L.drift;
            // state-constraint closure at the artificial right end
            flux[L.head_node] = h.envelope_plus(pl);
        }
    }
    return flux;
}

}  // namespace

double scheme_lipschitz(const GridFunction& state, const Grid& grid,
                        const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg) {
    const Network& net = grid.network();
    double lip = 1e-12;
    for (size_t e = 0; e < net.edges().size(); ++e) {
        const auto& L = grid.edge_layout(static_cast<int>(e));
        double smin = std::numeric_limits<double>::infinity(), smax = -smin;
        for (int k = 0; k < L.cells; ++k) {
            double s = (state.values[grid.edge_node(e, k + 1)] - state.values[grid.edge_node(e, k)]) /
                           L.dx +
                       L.drift;
            smin = std::min(smin, s);
            smax = std::max(smax, s);
        }
        double pad = 0.1 * (smax - smin) + 1e-3;
        double lo = smin - pad, hi = smax + pad;
        const auto& h = hs.at(e);
        const int m = 64;
        double prev = h(lo);
        for (int k = 1; k <= m; ++k) {
            double p = lo + (hi - lo) * k / m;
            double v = h(p);
            lip = std::max(lip, std::abs(v - prev) / ((hi - lo) / m));
            prev = v;
        }
    }
    for (size_t v = 0; v < net.vertices().size(); ++v) {
        const auto& cond = cfg.vertex_condition(static_cast<int>(v));
        if (!cond.general) continue;
        auto s = vertex_away_slopes(state, grid, static_cast<int>(v));
        double base = (*cond.general)(s);
        double lf = 0.0;
        const double hstep = 1e-4;
        for (size_t k = 0; k < s.size(); ++k) {
            auto q = s;
            q[k] += hstep;
            lf += std::abs(((*cond.general)(q) - base) / hstep);
        }
        lip = std::max(lip, lf);
    }
    return lip;
}

double max_stable_dt(const GridFunction& state, const Grid& grid,
                     const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg) {
    double dx_min = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < grid.network().edges().size(); ++e)
        dx_min = std::min(dx_min, grid.edge_layout(static_cast<int>(e)).dx);
    return cfg.cfl_safety * dx_min / scheme_lipschitz(state, grid, hs, cfg);
}

GridFunction step(const GridFunction& state, double dt, const Grid& grid,
                  const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg) {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    double allowed = max_stable_dt(state, grid, hs, cfg);
    if (dt > allowed * (1.0 + 1e-12))
        throw CflError("step: dt violates the CFL bound", allowed);
    auto flux = assemble_fluxes(state, grid, hs, cfg);
    GridFunction next = state;
    for (int i = 0; i < grid.node_count(); ++i) next.values[i] -= dt * flux[i];
    next.time = state.time + dt;
    return next;
}

GridFunction solve(const std::function<double(NetworkPoint)>& u0, double T, const Grid& grid,
                   const std::vector<QuasiConvexHamiltonian>& hs, const SchemeConfig& cfg,
                   const std::vector<double>& snapshot_times, std::vector<Snapshot>* snapshots) {
    GridFunction u{grid.sample(u0), 0.0};
    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    size_t next_snap = 0;
    auto record = [&]() {
        while (snapshots && next_snap < snaps.size() && u.time >= snaps[next_snap] - 1e-12) {
            snapshots->push_back({snaps[next_snap], u});
            ++next_snap;
        }
    };
    record();
    int guard = 0;
    while (u.time < T - 1e-12) {
        double dt = max_stable_dt(u, grid, hs, cfg);
        dt = std::min(dt, T - u.time);
        if (next_snap < snaps.size()) dt = std::min(dt, std::max(snaps[next_snap] - u.time, 1e-12));
        u = step(u, dt, grid, hs, cfg);
        record();
        if (++guard > 50'000'000) throw ConvergenceError("solve: step count blew up", dt);
    }
    return u;
}

GridFunction solve_stationary(const Grid& grid, const std::vector<QuasiConvexHamiltonian>& hs,
                              const SchemeConfig& cfg, double alpha,
                              std::vector<double>* residual_log, const GridFunction* warm_start) {
    if (!(alpha > 0.0)) throw ConfigError("stationary solve: discount must be positive");
    const int n = grid.node_count();
    GridFunction u;
    u.values.assign(n, 0.0);
    if (warm_start) u = *warm_start;

    double dx_min = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < grid.network().edges().size(); ++e)
        dx_min = std::min(dx_min, grid.edge_layout(static_cast<int>(e)).dx);

    const long max_iters = 1'000'000;
    double res = std::numeric_limits<double>::infinity();
    for (long it = 0; it < max_iters; ++it) {
        auto flux = assemble_fluxes(u, grid, hs, cfg);
        double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin, rsum = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = alpha * u.values[i] + flux[i];
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            rsum += r;
        }
        res = std::max(std::abs(rmin), std::abs(rmax));
        if (residual_log) residual_log->push_back(res);
        if (res < 1e-8) return u;

        double rmean = rsum / n;
        if (rmax - rmin < 0.5 * std::abs(rmean)) {
            // residual dominated by the constant mode: solve it exactly
            for (auto& v : u.values) v -= rmean / alpha;
            continue;
        }
        double lip = scheme_lipschitz(u, grid, hs, cfg);
        double tau = cfg.cfl_safety / (lip / dx_min + alpha);
        for (int i = 0; i < n; ++i) u.values[i] -= tau * (alpha * u.values[i] + flux[i]);
    }
    throw ConvergenceError("stationary solve: iteration cap reached", res);
}

ReductionResult reduction_experiment(const JunctionFunction& F,
                                     const std::vector<QuasiConvexHamiltonian>& hs,
                                     const std::function<double(NetworkPoint)>& u0, double T,
                                     const Grid& grid, const SchemeConfig& base_cfg,
                                     double region_radius) {
    ReductionResult out;
    out.flux_limit = reduce_to_flux_limit(F, hs);

    SchemeConfig cfg_general = base_cfg;
    SchemeConfig cfg_limiter = base_cfg;
    for (size_t v = 0; v < grid.network().vertices().size(); ++v) {
        VertexCondition general;
        general.general = F;
        cfg_general.per_vertex[static_cast<int>(v)] = general;
        cfg_limiter.per_vertex[static_cast<int>(v)] = VertexCondition{FluxLimiter(out.flux_limit), {}};
    }
    out.with_general = solve(u0, T, grid, hs, cfg_general);
    out.with_limiter = solve(u0, T, grid, hs, cfg_limiter);

    const Network& net = grid.network();
    NetworkPoint origin = grid.node_point(0);
    out.sup_gap = 0.0;
    for (int i = 0; i < grid.node_count(); ++i) {
        if (net.geodesic_distance(origin, grid.node_point(i)) > region_radius) continue;
        out.sup_gap = std::max(out.sup_gap,
                               std::abs(out.with_general.values[i] - out.with_limiter.values[i]));
    }
    return out;
}

}  // namespace hjnet
