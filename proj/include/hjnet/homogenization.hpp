#ifndef HJNET_HOMOGENIZATION_HPP
#define HJNET_HOMOGENIZATION_HPP

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "hjnet/flux_limiter.hpp"
#include "hjnet/hamiltonian.hpp"
#include "hjnet/network.hpp"
#include "hjnet/solver.hpp"

namespace hjnet {

// Periodic unit cell: one Hamiltonian per coordinate direction and a flux
// limiter at the single cell vertex.
struct PeriodicCell {
    int dimension = 1;
    std::vector<QuasiConvexHamiltonian> hs;  // exactly `dimension` entries
    FluxLimiter A = FluxLimiter::minus_infinity();
};

struct CellSolution {
    double lambda = 0.0;                  // limit of alpha * v^alpha(0)
    GridFunction corrector;               // v^alpha - v^alpha(0) at the smallest discount
    std::vector<double> alphas;           // discount ladder used
    std::vector<double> lambda_per_alpha;
    bool richardson_suspect = false;      // extrapolation disagrees by > 10%
};

// Grid network with vertices eps*Z^d inside the extent box and unit-direction
// edges of length eps. Supported for d in {1,2}.
Network build_periodic_network(int d, double eps,
                               const std::vector<std::pair<double, double>>& extent);

// Quotient cell graph: one vertex, d self-loop edges of length 1.
Network build_cell_network(int d);

// Discounted cell problem along the vanishing-discount ladder; lambda is
// read off the smallest discount with a Richardson sanity check.
CellSolution cell_problem(const PeriodicCell& cell, const std::vector<double>& P,
                          int grid_resolution,
                          const std::vector<double>& alphas = {1e-1, 1e-2, 1e-3});

struct EffectiveRow {
    std::vector<double> P;
    double lambda_numeric;
    double hbar_formula;
    double gap;  // |(-lambda) - hbar|
};

std::vector<EffectiveRow> effective_check(const PeriodicCell& cell,
                                          const std::vector<std::vector<double>>& P_samples,
                                          int grid_resolution);

struct EpsErrorRow {
    double eps;
    double sup_error;
};

struct EpsConvergenceOptions {
    double extent = 3.0;         // oscillating problem solved on [-extent, extent]
    int cells_per_edge = 8;      // dx = eps / cells_per_edge
    double compare_radius = 1.5; // sup-error measured on [-radius, radius]
    double compare_step = 0.05;
};

// d = 1 oscillating solves against the effective single-line solve, one
// sup-error per epsilon.
std::vector<EpsErrorRow> eps_convergence(const PeriodicCell& cell,
                                         const std::function<double(double)>& u0, double T,
                                         const std::vector<double>& eps_ladder,
                                         const EpsConvergenceOptions& opt = {});

}  // namespace hjnet

#endif
