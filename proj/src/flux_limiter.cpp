#include "hjnet/flux_limiter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "hjnet/errors.hpp"

namespace hjnet {

double FluxLimiter::value() const {
    if (minus_inf_) throw ConfigError("the -inf flux limiter has no real value; resolve it first");
    return value_;
}

JunctionFunction make_junction_function(int arity,
                                        std::function<double(const std::vector<double>&)> eval,
                                        bool spot_check) {
    if (arity < 1) throw ConfigError("junction function arity must be >= 1");
    JunctionFunction F{arity, std::move(eval)};
    if (spot_check) {
        std::mt19937 rng(0x5eedu);
        std::uniform_real_distribution<double> coord(-8.0, 8.0);
        std::uniform_real_distribution<double> bump(1e-3, 1.0);
        for (int trial = 0; trial < 64; ++trial) {
            std::vector<double> p(arity);
            for (auto& v : p) v = coord(rng);
            double base = F(p);
            int i = trial % arity;
            auto q = p;
            q[i] += bump(rng);
            if (F(q) > base + 1e-9)
                throw ConfigError("junction function is increasing in coordinate " +
                                  std::to_string(i) + "; it must be nonincreasing");
        }
    }
    return F;
}

double minimal_limiter(const std::vector<QuasiConvexHamiltonian>& hs) {
    if (hs.empty()) throw ConfigError("minimal limiter needs at least one Hamiltonian");
    double a0 = hs[0].min_value();
    for (const auto& h : hs) a0 = std::max(a0, h.min_value());
    return a0;
}

double limited_flux(const FluxLimiter& A, const std::vector<double>& p,
                    const std::vector<QuasiConvexHamiltonian>& hs) {
    if (p.size() != hs.size())
        throw ConfigError("limited flux: slope count does not match Hamiltonian count");
    // max_i H_i^-(p_i) >= A0 already, so the -inf marker needs no special floor
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < hs.size(); ++i) m = std::max(m, hs[i].envelope_minus(p[i]));
    if (!A.is_minus_infinity()) m = std::max(m, A.value());
    return m;
}

JunctionFunction limited_flux_function(const FluxLimiter& A,
                                       std::vector<QuasiConvexHamiltonian> hs) {
    int arity = static_cast<int>(hs.size());
    auto shared = std::make_shared<std::vector<QuasiConvexHamiltonian>>(std::move(hs));
    return make_junction_function(
        arity, [A, shared](const std::vector<double>& p) { return limited_flux(A, p, *shared); },
        /*spot_check=*/false);
}

double reduce_to_flux_limit(const JunctionFunction& F,
                            const std::vector<QuasiConvexHamiltonian>& hs) {
    if (F.arity != static_cast<int>(hs.size()))
        throw ConfigError("junction function arity does not match Hamiltonian count");
    const double a0 = minimal_limiter(hs);

    auto roots_at = [&](double level) {
        std::vector<double> p(hs.size());
        for (size_t i = 0; i < hs.size(); ++i) p[i] = hs[i].partial_inverse(level, Branch::plus);
        return p;
    };

    const double f0 = F(roots_at(a0));
    if (f0 < a0) return a0;

    // g(A) = F(pi^+(A)) - A is strictly decreasing, g(a0) >= 0
    auto g = [&](double a) { return F(roots_at(a)) - a; };
    double lo = a0;
    double hi = a0 + 10.0 * (1.0 + std::abs(f0));
    int expansions = 0;
    while (g(hi) > 0.0) {
        lo = hi;
        hi = a0 + 2.0 * (hi - a0);
        if (++expansions > 24)
            throw SearchBoundError("flux-limit reduction: no sign change inside the search bound");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * (1.0 + std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> ishii_limiters(const QuasiConvexHamiltonian& h1,
                                         const QuasiConvexHamiltonian& h2) {
    const double a0 = std::max(h1.min_value(), h2.min_value());
    const double lo = std::min(h1.argmin(), h2.argmin());
    const double hi = std::max(h1.argmin(), h2.argmin());

    auto chord_min = [&](double q) { return std::min(h1(q), h2(q)); };

    // A* = max over the chord of min(H1,H2); the objective need not be
    // unimodal, so scan a dense grid first and refine locally
    double a_star = chord_min(lo);
    if (hi > lo) {
        const int n = 1001;
        int besti = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double q = lo + (hi - lo) * i / (n - 1);
            double v = chord_min(q);
            if (v > best) {
                best = v;
                besti = i;
            }
        }
        double a = lo + (hi - lo) * std::max(0, besti - 1) / (n - 1);
        double b = lo + (hi - lo) * std::min(n - 1, besti + 1) / (n - 1);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = chord_min(x1), f2 = chord_min(x2);
        for (int it = 0; it < 120 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
            if (f1 >= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = chord_min(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = chord_min(x2);
            }
        }
        a_star = std::max(best, chord_min(0.5 * (a + b)));
    }

    double ai_plus = std::max(a_star, a0);
    double ai_minus = (h2.argmin() < h1.argmin()) ? ai_plus : a0;
    return {ai_minus, ai_plus};
}

double effective_hamiltonian(const std::vector<double>& P,
                             const std::vector<QuasiConvexHamiltonian>& hs,
                             const FluxLimiter& A) {
    if (P.size() != hs.size())
        throw ConfigError("effective Hamiltonian: dimension mismatch");
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < hs.size(); ++i) m = std::max(m, hs[i](P[i]));
    if (!A.is_minus_infinity()) m = std::max(m, A.value());
    return m;
}

double two_sided_flux(const FluxLimiter& A, double q1, double q2,
                      const QuasiConvexHamiltonian& h1, const QuasiConvexHamiltonian& h2) {
    double m = std::max(h1.envelope_plus(q1), h2.envelope_minus(q2));
    if (!A.is_minus_infinity()) m = std::max(m, A.value());
    return m;
}

}  // namespace hjnet
