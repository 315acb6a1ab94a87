#ifndef HJNET_VERTEX_TEST_HPP
#define HJNET_VERTEX_TEST_HPP

#include <memory>
#include <utility>
#include <vector>

#include "hjnet/flux_limiter.hpp"
#include "hjnet/hamiltonian.hpp"

namespace hjnet {

// Membership test for the germ of exact linear solutions through the vertex:
// H_i(p_i) = F_A(p) = lambda for all i when N >= 2, H_1(p_1) = lambda >= A
// when N = 1, all within tol.
bool germ_contains(const std::vector<double>& p, double lambda, const FluxLimiter& A,
                   const std::vector<QuasiConvexHamiltonian>& hs, double tol);

// The level function of the germ-dual foliation: the unique lambda >= A at
// which sup_{(p,lambda) in germ} (p.z - lambda) is attained. Requires z to
// avoid the open positive orthant when N >= 2.
double foliation_level(const std::vector<double>& z, const FluxLimiter& A,
                       const std::vector<QuasiConvexHamiltonian>& hs);

struct VertexTestEval {
    double value = 0.0;   // normalized: G(0,0) = 0
    double gx = 0.0;      // d/dx (into branch i); right-sided at kinks
    double gy = 0.0;      // d/dy (into branch j); right-sided at kinks
    double gx_left = 0.0, gx_right = 0.0;
    double gy_left = 0.0, gy_right = 0.0;
    double lambda = 0.0;  // germ level backing the evaluation point
};

// Raw G^0 evaluation (not normalized: G^0(0,0) = -A). x = (branch i, offset
// a), y = (branch j, offset b). The construction lives in the frame where
// every branch minimizer sits at the origin; off-center Hamiltonians are
// translated there first.
VertexTestEval g0_eval(int i, double a, int j, double b, const FluxLimiter& A,
                       const std::vector<QuasiConvexHamiltonian>& hs);

enum class VertexTestKind { g0, regularized, piecewise_sharp };

struct SharpLadder {
    std::vector<double> lambdas;                                   // lambda_0 = A, ...
    std::vector<std::vector<std::pair<double, double>>> breakpoints;  // [branch][k] -> (z^-, z^+)
    bool truncated = false;
};

// Evaluable vertex test function tied to one junction: raw G^0, its C^1
// regularization, or the piecewise-linear sharp variant. Normalized so that
// G >= 0 and G(0,0) = 0. Immutable; evaluation is pure.
class VertexTestFunction {
public:
    VertexTestKind kind() const;
    int branch_count() const;
    double limiter() const;  // effective A (clamped to >= A0)
    double gamma() const;    // compatibility budget (0 for raw G^0)
    double epsilon() const;  // regularization width, 0 otherwise
    const SharpLadder& ladder() const;
    const std::vector<QuasiConvexHamiltonian>& hamiltonians() const;
    // minimizer-centered copies: the frame the construction works in
    const std::vector<QuasiConvexHamiltonian>& normalized_hamiltonians() const;

    VertexTestEval eval(int i, double a, int j, double b) const;

    struct Impl;
    explicit VertexTestFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

VertexTestFunction make_g0(const std::vector<QuasiConvexHamiltonian>& hs, const FluxLimiter& A);

// C^1 vertex test function with diagonal bound and compatibility residual
// both within gamma. The regularization width shrinks automatically until a
// sampled validation passes.
VertexTestFunction regularize(const std::vector<QuasiConvexHamiltonian>& hs,
                              const FluxLimiter& A, double gamma);

// Piecewise-linear second vertex test function on the level ladder
// lambda_k = A + k*gamma0; one-sided derivatives at kinks.
VertexTestFunction build_sharp(const std::vector<QuasiConvexHamiltonian>& hs,
                               const FluxLimiter& A, double gamma0, double radius = 16.0);

// H(y,-G_y) - H(x,G_x) at one sampled pair; one-sided gradients are folded
// with the max(H^+(left),H^-(right)) convention, vertex slots with the
// limited flux.
double pair_compatibility_residual(const VertexTestFunction& G, int i, double a, int j, double b);

// Max over sampled pairs of the above. The sampler skips the off-origin
// in-branch diagonal for raw G^0 and for the sharp kind.
double compatibility_residual(const VertexTestFunction& G, int sample_count,
                              double radius = 4.0, unsigned seed = 12345u);

}  // namespace hjnet

#endif
