#ifndef HJNET_FLUX_LIMITER_HPP
#define HJNET_FLUX_LIMITER_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hjnet/hamiltonian.hpp"

namespace hjnet {

// Flux limiter value: a real, or the -inf marker that collapses to the
// minimal limiter A0 of the ambient junction. Kept as a tagged value so the
// marker can never leak into arithmetic.
class FluxLimiter {
public:
    FluxLimiter() : minus_inf_(true), value_(0.0) {}
    explicit FluxLimiter(double a) : minus_inf_(false), value_(a) {}
    static FluxLimiter minus_infinity() { return FluxLimiter(); }

    bool is_minus_infinity() const { return minus_inf_; }
    double value() const;
    // the effective real limiter once the junction's A0 is known
    double resolve(double a0) const { return minus_inf_ ? a0 : value_; }

private:
    bool minus_inf_;
    double value_;
};

// Continuous junction function F: R^N -> R, nonincreasing in every
// coordinate. Monotonicity is spot-checked at construction.
struct JunctionFunction {
    int arity = 0;
    std::function<double(const std::vector<double>&)> eval;

    double operator()(const std::vector<double>& p) const { return eval(p); }
};

JunctionFunction make_junction_function(int arity,
                                        std::function<double(const std::vector<double>&)> eval,
                                        bool spot_check = true);

// F built from a limiter A and branch Hamiltonians (the limited flux itself
// viewed as a junction function).
JunctionFunction limited_flux_function(const FluxLimiter& A,
                                       std::vector<QuasiConvexHamiltonian> hs);

// A0 = max_i min H_i
double minimal_limiter(const std::vector<QuasiConvexHamiltonian>& hs);

// F_A(p) = max(A, max_i H_i^-(p_i)); the -inf marker collapses to A0.
double limited_flux(const FluxLimiter& A, const std::vector<double>& p,
                    const std::vector<QuasiConvexHamiltonian>& hs);

// The unique limiter A_F whose limited flux is equivalent to the general
// monotone junction function F.
double reduce_to_flux_limit(const JunctionFunction& F,
                            const std::vector<QuasiConvexHamiltonian>& hs);

// Extremal Ishii limiters (A_I^-, A_I^+) of a two-Hamiltonian real-line
// discontinuity.
std::pair<double, double> ishii_limiters(const QuasiConvexHamiltonian& h1,
                                         const QuasiConvexHamiltonian& h2);

// Closed-form effective Hamiltonian of the periodic network:
// max(A, max_i H_i(P_i)).
double effective_hamiltonian(const std::vector<double>& P,
                             const std::vector<QuasiConvexHamiltonian>& hs,
                             const FluxLimiter& A);

// Two-sided real-line flux: max(A, H1^+(q1), H2^-(q2)).
double two_sided_flux(const FluxLimiter& A, double q1, double q2,
                      const QuasiConvexHamiltonian& h1, const QuasiConvexHamiltonian& h2);

}  // namespace hjnet

#endif
