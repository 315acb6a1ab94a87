#include "hjnet/run.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>
#include <vector>

#include "hjnet/control.hpp"
#include "hjnet/errors.hpp"
#include "hjnet/flux_limiter.hpp"
#include "hjnet/hamiltonian.hpp"
#include "hjnet/homogenization.hpp"
#include "hjnet/network.hpp"
#include "hjnet/solver.hpp"
#include "hjnet/vertex_test.hpp"

namespace hjnet::cli {

using nlohmann::json;

namespace {

// ------------------------------------------------------------------ helpers

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string config_hash(const json& doc) {
    // FNV-1a, stable across platforms so golden files stay valid
    std::string s = doc.dump();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + path + "." + it.key() + "'");
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

// worker fan-out for independent sweep entries; HJNET_THREADS caps workers,
// results are collected by index so the output order is deterministic
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HJNET_THREADS")) workers = std::atoi(env);
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            try {
                for (int i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                cursor.store(n);
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------------------------------------------ parsers

QuasiConvexHamiltonian parse_hamiltonian(const json& spec, const std::string& path) {
    if (!spec.is_object()) throw ConfigError(path + ": expected a Hamiltonian object");
    if (!spec.contains("family")) throw ConfigError(path + ": missing 'family'");
    std::string family = spec.at("family").get<std::string>();
    double p_max = spec.value("p_max", kDefaultSearchBound);
    if (family == "quadratic") {
        check_keys(spec, {"family", "a", "center", "min", "p_max"}, path);
        return QuasiConvexHamiltonian::quadratic(spec.value("a", 1.0), spec.value("center", 0.0),
                                                 spec.value("min", 0.0), p_max);
    }
    if (family == "shifted_power") {
        check_keys(spec, {"family", "a", "center", "exponent", "min", "p_max"}, path);
        return QuasiConvexHamiltonian::shifted_power(spec.value("a", 1.0),
                                                     spec.value("center", 0.0),
                                                     spec.value("exponent", 1.0),
                                                     spec.value("min", 0.0), p_max);
    }
    if (family == "samples") {
        check_keys(spec, {"family", "points", "p_max"}, path);
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : spec.at("points"))
            pts.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        return QuasiConvexHamiltonian::piecewise_linear(std::move(pts), p_max);
    }
    if (family == "controls") {
        check_keys(spec, {"family", "samples", "p_max"}, path);
        BranchControl bc;
        for (const auto& row : spec.at("samples"))
            bc.samples.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
        return hamiltonian_from_controls(bc, p_max);
    }
    throw ConfigError(path + ": unknown Hamiltonian family '" + family + "'");
}

std::vector<QuasiConvexHamiltonian> parse_hamiltonians(const json& spec, size_t count,
                                                       const std::string& path) {
    std::vector<QuasiConvexHamiltonian> hs;
    if (spec.is_object()) {
        hs.assign(std::max<size_t>(count, 1), parse_hamiltonian(spec, path));
        return hs;
    }
    if (!spec.is_array()) throw ConfigError(path + ": expected an object or array");
    for (size_t i = 0; i < spec.size(); ++i)
        hs.push_back(parse_hamiltonian(spec[i], path + "[" + std::to_string(i) + "]"));
    if (count != 0 && hs.size() != count)
        throw ConfigError(path + ": expected " + std::to_string(count) + " Hamiltonians");
    return hs;
}

std::shared_ptr<const Network> parse_network(const json& spec) {
    check_keys(spec, {"junction", "edges", "vertices"}, "network");
    if (spec.contains("junction")) {
        int n = spec.at("junction").get<int>();
        return std::make_shared<Network>(build_junction(n));
    }
    if (!spec.contains("edges") || !spec.contains("vertices"))
        throw ConfigError("network: need either 'junction' or 'edges'+'vertices'");
    std::vector<std::string> vids;
    for (const auto& v : spec.at("vertices")) vids.push_back(v.get<std::string>());
    std::vector<EdgeSpec> edges;
    for (const auto& e : spec.at("edges")) {
        check_keys(e, {"id", "length", "tail", "head"}, "network.edges[]");
        EdgeSpec es;
        es.id = e.at("id").get<std::string>();
        if (e.contains("length") && !e.at("length").is_null())
            es.length = e.at("length").get<double>();
        es.tail = e.at("tail").get<std::string>();
        if (e.contains("head") && !e.at("head").is_null())
            es.head = e.at("head").get<std::string>();
        edges.push_back(es);
    }
    return std::make_shared<Network>(Network::from_parts(vids, edges));
}

FluxLimiter parse_limiter_value(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "-inf") return FluxLimiter::minus_infinity();
        throw ConfigError(path + ": limiter must be a number or \"-inf\"");
    }
    return FluxLimiter(require_number(j, path));
}

JunctionFunction parse_general_f(const json& spec, int arity) {
    check_keys(spec, {"affine"}, "general_F");
    if (!spec.contains("affine")) throw ConfigError("general_F: only the 'affine' family exists");
    const json& aff = spec.at("affine");
    check_keys(aff, {"constant", "coefficients"}, "general_F.affine");
    double c0 = aff.value("constant", 0.0);
    std::vector<double> coeffs;
    for (const auto& c : aff.at("coefficients")) coeffs.push_back(c.get<double>());
    if (static_cast<int>(coeffs.size()) != arity)
        throw ConfigError("general_F.affine: coefficient count must match the junction arity");
    for (double c : coeffs)
        if (c > 0.0) throw ConfigError("general_F.affine: coefficients must be <= 0");
    return make_junction_function(arity, [c0, coeffs](const std::vector<double>& p) {
        double v = c0;
        for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * p[i];
        return v;
    });
}

std::function<double(NetworkPoint)> parse_u0(const json& spec,
                                             const std::shared_ptr<const Network>& net) {
    check_keys(spec, {"type", "slopes", "base", "value", "clip", "scale"}, "u0");
    std::string type = spec.value("type", "constant");
    if (type == "constant") {
        double v = spec.value("value", 0.0);
        return [v](NetworkPoint) { return v; };
    }
    if (type == "linear") {
        double base = spec.value("base", 0.0);
        std::vector<double> slopes;
        for (const auto& s : spec.at("slopes")) slopes.push_back(s.get<double>());
        if (slopes.size() != net->edges().size())
            throw ConfigError("u0.linear: one slope per edge required");
        return [base, slopes](NetworkPoint p) { return base + slopes[p.edge] * p.offset; };
    }
    if (type == "neg_abs_clipped") {
        double clip = spec.value("clip", 1.5);
        double scale = spec.value("scale", 1.0);
        auto netp = net;
        NetworkPoint origin{0, 0.0};
        return [netp, clip, scale, origin](NetworkPoint p) {
            return std::max(-scale * netp->geodesic_distance(origin, p), -clip);
        };
    }
    throw ConfigError("u0: unknown type '" + type + "'");
}

struct VertexSetup {
    SchemeConfig cfg;
};

VertexSetup parse_vertex_setup(const json& doc, const std::shared_ptr<const Network>& net,
                               const std::vector<QuasiConvexHamiltonian>& hs) {
    VertexSetup vs;
    vs.cfg.cfl_safety = doc.contains("scheme") ? doc.at("scheme").value("cfl_safety", 0.5) : 0.5;

    // vertex conditions live under "vertex"; the flattened spellings are
    // accepted too
    const json* general = nullptr;
    const json* limiter = nullptr;
    if (doc.contains("vertex")) {
        check_keys(doc.at("vertex"), {"limiter", "general_F"}, "vertex");
        if (doc.at("vertex").contains("general_F")) general = &doc.at("vertex").at("general_F");
        if (doc.at("vertex").contains("limiter")) limiter = &doc.at("vertex").at("limiter");
    }
    if (!general && doc.contains("general_F")) general = &doc.at("general_F");
    if (!limiter && doc.contains("limiter")) limiter = &doc.at("limiter");

    if (general) {
        int arity = net->vertices().empty() ? 0 : net->vertices()[0].degree();
        JunctionFunction F = parse_general_f(*general, arity);
        for (size_t v = 0; v < net->vertices().size(); ++v) {
            if (net->vertices()[v].degree() != arity) continue;
            VertexCondition c;
            c.general = F;
            vs.cfg.per_vertex[static_cast<int>(v)] = c;
        }
        return vs;
    }
    if (limiter) {
        const json& lim = *limiter;
        if (lim.is_object()) {
            check_keys(lim, {"default", "per_vertex"}, "limiter");
            if (lim.contains("default"))
                vs.cfg.default_vertex.limiter = parse_limiter_value(lim.at("default"), "limiter.default");
            if (lim.contains("per_vertex"))
                for (auto it = lim.at("per_vertex").begin(); it != lim.at("per_vertex").end(); ++it)
                    vs.cfg.per_vertex[net->vertex_index(it.key())] =
                        VertexCondition{parse_limiter_value(it.value(), "limiter.per_vertex"), {}};
        } else {
            vs.cfg.default_vertex.limiter = parse_limiter_value(lim, "limiter");
        }
    }
    (void)hs;
    return vs;
}

Grid parse_grid(const json& doc, const std::shared_ptr<const Network>& net) {
    double dx = 0.01, trunc = 8.0;
    if (doc.contains("grid")) {
        check_keys(doc.at("grid"), {"dx", "truncation"}, "grid");
        dx = doc.at("grid").value("dx", 0.01);
        trunc = doc.at("grid").value("truncation", 8.0);
    }
    return Grid(net, dx, trunc);
}

// ------------------------------------------------------------------ schemas

const std::map<std::string, std::set<std::string>>& subcommand_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"solve",
         {"network", "hamiltonians", "vertex", "limiter", "general_F", "grid", "scheme", "T",
          "u0", "snapshots", "output"}},
        {"stationary",
         {"network", "hamiltonians", "vertex", "limiter", "grid", "scheme", "alpha", "drift",
          "output"}},
        {"limiter", {"hamiltonians", "general_F", "output"}},
        {"vtf-check",
         {"hamiltonians", "A", "gamma", "kind", "samples", "radius", "seed", "output"}},
        {"control",
         {"branches", "vertex_samples", "u0", "T", "grid", "time_steps", "regular_only",
          "output"}},
        {"cell", {"cell", "hamiltonians", "limiter", "P", "resolution", "alphas", "output"}},
        {"homogenize",
         {"cell", "hamiltonians", "limiter", "u0", "T", "eps", "resolution", "extent",
          "compare_radius", "output"}},
        {"reduce",
         {"network", "hamiltonians", "general_F", "u0", "T", "dx_values", "grid", "scheme",
          "region_radius", "output"}},
    };
    return keys;
}

}  // namespace

json parse_config(const std::string& subcommand, json doc) {
    auto it = subcommand_keys().find(subcommand);
    if (it == subcommand_keys().end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    check_keys(doc, it->second, subcommand);
    // defaults
    if (!doc.contains("T") && it->second.count("T")) doc["T"] = 1.0;
    if (it->second.count("grid")) {
        if (!doc.contains("grid")) doc["grid"] = json::object();
        if (!doc["grid"].contains("dx")) doc["grid"]["dx"] = 0.01;
    }
    if (it->second.count("scheme")) {
        if (!doc.contains("scheme")) doc["scheme"] = json::object();
        if (!doc["scheme"].contains("cfl_safety")) doc["scheme"]["cfl_safety"] = 0.5;
    }
    return doc;
}

namespace {

// ------------------------------------------------------------------ writers

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const json& doc, const std::vector<std::string>& columns)
        : out_(out) {
        out_ << "# config_hash=" << config_hash(doc) << "\n";
        for (size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
        out_ << "\n";
    }

private:
    std::ostream& out_;
};

void write_grid_function(CsvWriter& w, const Grid& grid, const GridFunction& u) {
    const Network& net = grid.network();
    for (size_t e = 0; e < net.edges().size(); ++e) {
        const auto& L = grid.edge_layout(static_cast<int>(e));
        for (int k = 0; k <= L.cells; ++k) {
            int node = grid.edge_node(static_cast<int>(e), k);
            w.row({fmt(u.time), net.edges()[e].id, fmt(k * L.dx), fmt(u.values[node])});
        }
    }
}

// ----------------------------------------------------------------- commands

void run_solve(const json& doc, std::ostream& out) {
    auto net = parse_network(doc.at("network"));
    auto hs = parse_hamiltonians(doc.at("hamiltonians"), net->edges().size(), "hamiltonians");
    auto setup = parse_vertex_setup(doc, net, hs);
    Grid grid = parse_grid(doc, net);
    auto u0 = parse_u0(doc.at("u0"), net);
    double T = doc.at("T").get<double>();
    std::vector<double> snaps;
    if (doc.contains("snapshots"))
        for (const auto& s : doc.at("snapshots")) snaps.push_back(s.get<double>());
    snaps.push_back(T);
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

    std::vector<Snapshot> recorded;
    solve(u0, T, grid, hs, setup.cfg, snaps, &recorded);

    CsvWriter w(out, doc, {"time", "edge_id", "offset", "value"});
    for (const auto& snap : recorded) write_grid_function(w, grid, snap.state);
}

void run_stationary(const json& doc, std::ostream& out) {
    auto net = parse_network(doc.at("network"));
    auto hs = parse_hamiltonians(doc.at("hamiltonians"), net->edges().size(), "hamiltonians");
    auto setup = parse_vertex_setup(doc, net, hs);
    Grid grid = parse_grid(doc, net);
    if (doc.contains("drift")) {
        const auto& d = doc.at("drift");
        if (!d.is_array() || d.size() != net->edges().size())
            throw ConfigError("drift: one slope per edge required");
        for (size_t e = 0; e < d.size(); ++e) grid.set_drift(static_cast<int>(e), d[e].get<double>());
    }
    double alpha = doc.value("alpha", 1.0);
    GridFunction u = solve_stationary(grid, hs, setup.cfg, alpha);
    CsvWriter w(out, doc, {"time", "edge_id", "offset", "value"});
    write_grid_function(w, grid, u);
}

void run_limiter(const json& doc, std::ostream& out) {
    auto hs = parse_hamiltonians(doc.at("hamiltonians"), 0, "hamiltonians");
    if (hs.empty()) throw ConfigError("limiter: need at least one Hamiltonian");
    CsvWriter w(out, doc, {"quantity", "value"});
    w.row({"a0", fmt(minimal_limiter(hs))});
    if (doc.contains("general_F")) {
        auto F = parse_general_f(doc.at("general_F"), static_cast<int>(hs.size()));
        w.row({"a_f", fmt(reduce_to_flux_limit(F, hs))});
    }
    if (hs.size() == 2) {
        auto [am, ap] = ishii_limiters(hs[0], hs[1]);
        w.row({"ai_minus", fmt(am)});
        w.row({"ai_plus", fmt(ap)});
    }
}

void run_vtf_check(const json& doc, std::ostream& out) {
    auto hs = parse_hamiltonians(doc.at("hamiltonians"), 0, "hamiltonians");
    if (hs.empty()) throw ConfigError("vtf-check: need at least one Hamiltonian");
    FluxLimiter A = doc.contains("A") ? parse_limiter_value(doc.at("A"), "A")
                                      : FluxLimiter::minus_infinity();
    std::string kind = doc.value("kind", "g0");
    double gamma = doc.value("gamma", 0.1);
    VertexTestFunction G = [&]() {
        if (kind == "g0") return make_g0(hs, A);
        if (kind == "regularized") return regularize(hs, A, gamma);
        if (kind == "sharp") return build_sharp(hs, A, gamma);
        throw ConfigError("vtf-check: unknown kind '" + kind + "'");
    }();

    int samples = doc.value("samples", 200);
    double radius = doc.value("radius", 4.0);
    unsigned seed = doc.value("seed", 12345u);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> branch(0, static_cast<int>(hs.size()) - 1);

    CsvWriter w(out, doc, {"x_branch", "x", "y_branch", "y", "G", "Gx", "Gy", "residual"});
    for (int s = 0; s < samples; ++s) {
        int i = branch(rng), j = branch(rng);
        double a = radius * unif(rng), b = radius * unif(rng);
        bool diag = i == j && std::min(a, b) > 0.0 && std::abs(a - b) <= 1e-9 * (1.0 + a + b);
        if (diag && kind != "regularized") b = 0.9 * a;  // stay off the excluded diagonal
        auto e = G.eval(i, a, j, b);
        double res = pair_compatibility_residual(G, i, a, j, b);
        w.row({std::to_string(i + 1), fmt(a), std::to_string(j + 1), fmt(b), fmt(e.value),
               fmt(e.gx), fmt(e.gy), fmt(res)});
    }
}

void run_control(const json& doc, std::ostream& out) {
    const auto& branches = doc.at("branches");
    if (!branches.is_array() || branches.empty())
        throw ConfigError("control: 'branches' must be a non-empty array");
    ControlProblem problem;
    problem.junction = std::make_shared<Network>(build_junction(static_cast<int>(branches.size())));
    for (const auto& b : branches) {
        BranchControl bc;
        for (const auto& row : b) bc.samples.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
        problem.branch_controls.push_back(std::move(bc));
    }
    if (doc.contains("vertex_samples"))
        for (const auto& row : doc.at("vertex_samples"))
            problem.vertex_control.samples.push_back(
                {row.at(0).get<double>(), row.at(1).get<double>()});
    problem.initial_cost = parse_u0(doc.at("u0"), problem.junction);

    Grid grid = parse_grid(doc, problem.junction);
    double T = doc.at("T").get<double>();
    double bmax = 0.0;
    for (const auto& bc : problem.branch_controls)
        for (const auto& s : bc.samples) bmax = std::max(bmax, std::abs(s.velocity));
    int steps = doc.value("time_steps", 0);
    if (steps <= 0) steps = std::max(1, static_cast<int>(std::ceil(T * bmax / grid.dx())));
    bool regular_only = doc.value("regular_only", false);

    GridFunction u = value_function_dp(problem, T, steps, grid, regular_only);
    CsvWriter w(out, doc, {"time", "edge_id", "offset", "value"});
    write_grid_function(w, grid, u);
}

PeriodicCell parse_cell(const json& doc) {
    PeriodicCell cell;
    if (doc.contains("cell")) {
        check_keys(doc.at("cell"), {"d"}, "cell");
        cell.dimension = doc.at("cell").value("d", 1);
    }
    cell.hs = parse_hamiltonians(doc.at("hamiltonians"), cell.dimension, "hamiltonians");
    if (doc.contains("limiter")) cell.A = parse_limiter_value(doc.at("limiter"), "limiter");
    return cell;
}

void run_cell(const json& doc, std::ostream& out) {
    PeriodicCell cell = parse_cell(doc);
    int resolution = doc.value("resolution", 100);
    std::vector<double> alphas = {1e-1, 1e-2, 1e-3};
    if (doc.contains("alphas")) {
        alphas.clear();
        for (const auto& a : doc.at("alphas")) alphas.push_back(a.get<double>());
    }
    std::vector<std::vector<double>> Ps;
    for (const auto& p : doc.at("P")) {
        if (p.is_array()) {
            std::vector<double> v;
            for (const auto& c : p) v.push_back(c.get<double>());
            Ps.push_back(v);
        } else {
            Ps.push_back({p.get<double>()});
        }
    }
    std::vector<EffectiveRow> rows(Ps.size());
    parallel_for(static_cast<int>(Ps.size()), [&](int i) {
        auto sol = cell_problem(cell, Ps[i], resolution, alphas);
        rows[i] = {Ps[i], sol.lambda, effective_hamiltonian(Ps[i], cell.hs, cell.A),
                   std::abs(-sol.lambda - effective_hamiltonian(Ps[i], cell.hs, cell.A))};
    });
    CsvWriter w(out, doc, {"P", "lambda_num", "lambda_formula", "gap"});
    for (const auto& r : rows) {
        std::string pcol;
        for (size_t k = 0; k < r.P.size(); ++k) pcol += (k ? ";" : "") + fmt(r.P[k]);
        w.row({pcol, fmt(r.lambda_numeric), fmt(-r.hbar_formula), fmt(r.gap)});
    }
}

void run_homogenize(const json& doc, std::ostream& out) {
    PeriodicCell cell = parse_cell(doc);
    if (cell.dimension != 1) throw ConfigError("homogenize: d = 1 only");
    const json& u0spec = doc.at("u0");
    check_keys(u0spec, {"type", "value", "clip", "scale", "slopes", "base"}, "u0");
    std::string type = u0spec.value("type", "constant");
    std::function<double(double)> u0;
    if (type == "constant") {
        double v = u0spec.value("value", 0.0);
        u0 = [v](double) { return v; };
    } else if (type == "neg_abs_clipped") {
        double clip = u0spec.value("clip", 1.5);
        double scale = u0spec.value("scale", 1.0);
        u0 = [clip, scale](double x) { return std::max(-scale * std::abs(x), -clip); };
    } else {
        throw ConfigError("homogenize: u0 type must be constant or neg_abs_clipped");
    }
    double T = doc.at("T").get<double>();
    std::vector<double> eps;
    for (const auto& e : doc.at("eps")) eps.push_back(e.get<double>());
    EpsConvergenceOptions opt;
    opt.extent = doc.value("extent", 3.0);
    opt.compare_radius = doc.value("compare_radius", 1.5);
    opt.cells_per_edge = doc.value("resolution", 8);
    auto rows = eps_convergence(cell, u0, T, eps, opt);
    CsvWriter w(out, doc, {"eps", "sup_error"});
    for (const auto& r : rows) w.row({fmt(r.eps), fmt(r.sup_error)});
}

void run_reduce(const json& doc, std::ostream& out) {
    auto net = parse_network(doc.at("network"));
    auto hs = parse_hamiltonians(doc.at("hamiltonians"), net->edges().size(), "hamiltonians");
    int arity = net->vertices()[0].degree();
    JunctionFunction F = parse_general_f(doc.at("general_F"), arity);
    auto u0 = parse_u0(doc.at("u0"), net);
    double T = doc.at("T").get<double>();
    double region = doc.value("region_radius", 1.0);
    double trunc = doc.contains("grid") ? doc.at("grid").value("truncation", 8.0) : 8.0;
    SchemeConfig base;
    base.cfl_safety = doc.contains("scheme") ? doc.at("scheme").value("cfl_safety", 0.5) : 0.5;

    std::vector<double> dxs;
    if (doc.contains("dx_values"))
        for (const auto& d : doc.at("dx_values")) dxs.push_back(d.get<double>());
    else
        dxs.push_back(doc.at("grid").value("dx", 0.01));

    std::vector<ReductionResult> results(dxs.size());
    parallel_for(static_cast<int>(dxs.size()), [&](int i) {
        Grid grid(net, dxs[i], trunc);
        results[i] = reduction_experiment(F, hs, u0, T, grid, base, region);
    });
    CsvWriter w(out, doc, {"dx", "a_f", "sup_gap"});
    for (size_t i = 0; i < dxs.size(); ++i)
        w.row({fmt(dxs[i]), fmt(results[i].flux_limit), fmt(results[i].sup_gap)});
}

}  // namespace

void run(const std::string& subcommand, const json& config, std::ostream* out_override) {
    std::ofstream file;
    std::ostream* out = out_override;
    if (!out) {
        if (config.contains("output")) {
            file.open(config.at("output").get<std::string>());
            if (!file) throw ConfigError("cannot open output file");
            out = &file;
        } else {
            out = &std::cout;
        }
    }
    if (subcommand == "solve") return run_solve(config, *out);
    if (subcommand == "stationary") return run_stationary(config, *out);
    if (subcommand == "limiter") return run_limiter(config, *out);
    if (subcommand == "vtf-check") return run_vtf_check(config, *out);
    if (subcommand == "control") return run_control(config, *out);
    if (subcommand == "cell") return run_cell(config, *out);
    if (subcommand == "homogenize") return run_homogenize(config, *out);
    if (subcommand == "reduce") return run_reduce(config, *out);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

namespace {

void apply_override(json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value");
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    json* cursor = &doc;
    size_t pos = 0;
    while (true) {
        size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*cursor)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        cursor = &(*cursor)[key];
        pos = dot + 1;
    }
}

}  // namespace

int main_entry(int argc, const char* const* argv) {
    auto fail = [](int code, const std::string& type, const std::string& message) {
        json record = {{"error", {{"type", type}, {"message", message}}}};
        std::cerr << record.dump() << "\n";
        return code;
    };
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        if (args.size() < 2) {
            std::cerr << "usage: hjnet <subcommand> <config.json> [--set key=value]... [-o file]\n"
                      << "subcommands: solve stationary limiter vtf-check control cell "
                         "homogenize reduce\n";
            return kExitConfig;
        }
        std::string subcommand = args[0];
        std::ifstream in(args[1]);
        if (!in) return fail(kExitConfig, "config", "cannot open config file: " + args[1]);
        json doc = json::parse(in);
        std::string output_override;
        for (size_t i = 2; i < args.size(); ++i) {
            if (args[i] == "--set" && i + 1 < args.size()) {
                apply_override(doc, args[++i]);
            } else if (args[i] == "-o" && i + 1 < args.size()) {
                output_override = args[++i];
            } else {
                return fail(kExitConfig, "config", "unknown argument: " + args[i]);
            }
        }
        if (!output_override.empty()) doc["output"] = output_override;
        json validated = parse_config(subcommand, doc);
        run(subcommand, validated);
        return kExitOk;
    } catch (const ConfigError& e) {
        return fail(kExitConfig, "config", e.what());
    } catch (const json::exception& e) {
        return fail(kExitConfig, "config", e.what());
    } catch (const Error& e) {
        return fail(kExitNumerical, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(kExitNumerical, "internal", e.what());
    }
}

}  // namespace hjnet::cli
