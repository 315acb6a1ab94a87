#include "hjnet/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjnet/errors.hpp"

namespace hjnet {

Network build_periodic_network(int d, double eps,
                               const std::vector<std::pair<double, double>>& extent) {
    if (d < 1 || d > 2) throw ConfigError("periodic network supported for d in {1,2} only");
    if (!(eps > 0.0)) throw ConfigError("periodic network: eps must be positive");
    if (extent.size() != static_cast<size_t>(d))
        throw ConfigError("periodic network: extent needs one interval per dimension");

    auto axis_counts = [&](int k) {
        long lo = std::llround(std::ceil(extent[k].first / eps - 1e-9));
        long hi = std::llround(std::floor(extent[k].second / eps + 1e-9));
        if (hi < lo) throw ConfigError("periodic network: extent contains no lattice point");
        return std::make_pair(lo, hi);
    };

    std::vector<std::string> vertex_ids;
    std::vector<EdgeSpec> edges;
    if (d == 1) {
        auto [lo, hi] = axis_counts(0);
        for (long i = lo; i <= hi; ++i) vertex_ids.push_back("n" + std::to_string(i));
        for (long i = lo; i < hi; ++i)
            edges.push_back(EdgeSpec{"e" + std::to_string(i), eps, "n" + std::to_string(i),
                                     "n" + std::to_string(i + 1)});
    } else {
        auto [lo0, hi0] = axis_counts(0);
        auto [lo1, hi1] = axis_counts(1);
        auto vid = [](long i, long j) {
            return "n" + std::to_string(i) + "_" + std::to_string(j);
        };
        for (long j = lo1; j <= hi1; ++j)
            for (long i = lo0; i <= hi0; ++i) vertex_ids.push_back(vid(i, j));
        for (long j = lo1; j <= hi1; ++j)
            for (long i = lo0; i < hi0; ++i)
                edges.push_back(
                    EdgeSpec{"ex" + std::to_string(i) + "_" + std::to_string(j), eps, vid(i, j),
                             vid(i + 1, j)});
        for (long j = lo1; j < hi1; ++j)
            for (long i = lo0; i <= hi0; ++i)
                edges.push_back(
                    EdgeSpec{"ey" + std::to_string(i) + "_" + std::to_string(j), eps, vid(i, j),
                             vid(i, j + 1)});
    }
    return Network::from_parts(vertex_ids, edges);
}

Network build_cell_network(int d) {
    if (d < 1 || d > 2) throw ConfigError("cell network supported for d in {1,2} only");
    std::vector<EdgeSpec> edges;
    for (int k = 0; k < d; ++k)
        edges.push_back(EdgeSpec{"loop" + std::to_string(k), 1.0, "cell", "cell"});
    return Network::from_parts({"cell"}, edges);
}

CellSolution cell_problem(const PeriodicCell& cell, const std::vector<double>& P,
                          int grid_resolution, const std::vector<double>& alphas) {
    if (cell.dimension < 1 || cell.dimension > 2)
        throw ConfigError("cell problem supported for d in {1,2} only");
    if (static_cast<int>(cell.hs.size()) != cell.dimension)
        throw ConfigError("cell problem: one Hamiltonian per direction required");
    if (static_cast<int>(P.size()) != cell.dimension)
        throw ConfigError("cell problem: P dimension mismatch");
    if (alphas.empty()) throw ConfigError("cell problem: empty discount ladder");

    auto net = std::make_shared<Network>(build_cell_network(cell.dimension));
    Grid grid(net, 1.0 / grid_resolution);
    for (int k = 0; k < cell.dimension; ++k) grid.set_drift(k, P[k]);

    SchemeConfig cfg;
    cfg.default_vertex.limiter = cell.A;

    CellSolution out;
    std::vector<double> ladder = alphas;
    std::sort(ladder.begin(), ladder.end(), std::greater<double>());
    GridFunction u;
    bool have_prev = false;
    double prev_alpha = 0.0;
    for (double alpha : ladder) {
        GridFunction warm;
        const GridFunction* warm_ptr = nullptr;
        if (have_prev) {
            // the constant mode scales like 1/alpha along the ladder
            warm = u;
            for (auto& v : warm.values) v *= prev_alpha / alpha;
            warm_ptr = &warm;
        }
        u = solve_stationary(grid, cell.hs, cfg, alpha, nullptr, warm_ptr);
        have_prev = true;
        prev_alpha = alpha;
        out.alphas.push_back(alpha);
        out.lambda_per_alpha.push_back(alpha * u.values[grid.vertex_node(0)]);
    }
    out.lambda = out.lambda_per_alpha.back();

    if (out.lambda_per_alpha.size() >= 2) {
        size_t n = out.lambda_per_alpha.size();
        double a2 = out.alphas[n - 2], a3 = out.alphas[n - 1];
        double l2 = out.lambda_per_alpha[n - 2], l3 = out.lambda_per_alpha[n - 1];
        double extrapolated = l3 + (l3 - l2) * a3 / (a2 - a3);
        out.richardson_suspect =
            std::abs(extrapolated - out.lambda) > 0.1 * std::max(1.0, std::abs(out.lambda));
    }

    out.corrector = u;
    double v0 = u.values[grid.vertex_node(0)];
    for (auto& v : out.corrector.values) v -= v0;
    return out;
}

std::vector<EffectiveRow> effective_check(const PeriodicCell& cell,
                                          const std::vector<std::vector<double>>& P_samples,
                                          int grid_resolution) {
    std::vector<EffectiveRow> rows;
    rows.reserve(P_samples.size());
    for (const auto& P : P_samples) {
        auto sol = cell_problem(cell, P, grid_resolution);
        EffectiveRow row;
        row.P = P;
        row.lambda_numeric = sol.lambda;
        row.hbar_formula = effective_hamiltonian(P, cell.hs, cell.A);
        row.gap = std::abs(-sol.lambda - row.hbar_formula);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<EpsErrorRow> eps_convergence(const PeriodicCell& cell,
                                         const std::function<double(double)>& u0, double T,
                                         const std::vector<double>& eps_ladder,
                                         const EpsConvergenceOptions& opt) {
    if (cell.dimension != 1) throw ConfigError("eps convergence study runs the d=1 instance");
    const auto& h = cell.hs.at(0);

    // effective Hamiltonian max(A, H(p)) as a bona fide quasi-convex function
    double a_eff = cell.A.resolve(minimal_limiter(cell.hs));
    QuasiConvexHamiltonian hbar = QuasiConvexHamiltonian::from_function(
        [h, a_eff](double p) { return std::max(a_eff, h(p)); }, h.search_bound(), std::nullopt,
        "effective");

    const double X = opt.extent;
    const double dx_eff = eps_ladder.empty() ? 0.01
                                             : *std::min_element(eps_ladder.begin(),
                                                                 eps_ladder.end()) /
                                                   opt.cells_per_edge;

    // effective solution on a single segment [-X, X]
    auto line = std::make_shared<Network>(Network::from_parts(
        {"L", "R"}, {EdgeSpec{"seg", 2.0 * X, "L", "R"}}));
    Grid line_grid(line, dx_eff);
    SchemeConfig line_cfg;  // -inf limiter at both endpoints = state constraint closure
    auto line_u0 = [&](NetworkPoint p) { return u0(-X + p.offset); };
    GridFunction effective = solve(line_u0, T, line_grid, {hbar}, line_cfg);

    std::vector<EpsErrorRow> rows;
    for (double eps : eps_ladder) {
        auto net = std::make_shared<Network>(
            build_periodic_network(1, eps, {{-X, X}}));
        Grid grid(net, eps / opt.cells_per_edge);
        std::vector<QuasiConvexHamiltonian> hs(net->edges().size(), h);
        SchemeConfig cfg;
        cfg.default_vertex.limiter = cell.A;
        // extent-boundary vertices keep the plain state-constraint closure
        for (size_t v = 0; v < net->vertices().size(); ++v)
            if (net->vertices()[v].degree() == 1)
                cfg.per_vertex[static_cast<int>(v)] = VertexCondition{};
        // edges are built left to right starting at the first lattice point
        const double x_left = std::ceil(-X / eps - 1e-9) * eps;
        auto osc_u0 = [&](NetworkPoint p) { return u0(x_left + p.edge * eps + p.offset); };
        GridFunction osc = solve(osc_u0, T, grid, hs, cfg);

        double err = 0.0;
        for (double x = -opt.compare_radius; x <= opt.compare_radius + 1e-12;
             x += opt.compare_step) {
            double ue = line_grid.interpolate(effective.values, {0, x + X});
            int k = std::clamp(static_cast<int>(std::floor((x - x_left) / eps)), 0,
                               static_cast<int>(net->edges().size()) - 1);
            double off = std::clamp(x - (x_left + k * eps), 0.0, eps);
            double uo = grid.interpolate(osc.values, {k, off});
            err = std::max(err, std::abs(ue - uo));
        }
        rows.push_back({eps, err});
    }
    return rows;
}

}  // namespace hjnet
