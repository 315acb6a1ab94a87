#ifndef HJNET_HAMILTONIAN_HPP
#define HJNET_HAMILTONIAN_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hjnet {

inline constexpr double kDefaultSearchBound = 64.0;

enum class Branch { minus, plus };

// Coercive quasi-convex Hamiltonian of one variable: nonincreasing up to a
// minimizer p0, nondecreasing after it. Roots and minimizers are only ever
// sought inside [-search_bound, search_bound]. Immutable and freely
// shareable; evaluation is pure.
class QuasiConvexHamiltonian {
public:
    static QuasiConvexHamiltonian quadratic(double a, double center, double min_value,
                                            double search_bound = kDefaultSearchBound);
    // a*|p-center|^exponent + min_value, exponent >= 1
    static QuasiConvexHamiltonian shifted_power(double a, double center, double exponent,
                                                double min_value,
                                                double search_bound = kDefaultSearchBound);
    // piecewise-linear interpolation of (p, H(p)) samples, extended with the
    // end slopes beyond the table
    static QuasiConvexHamiltonian piecewise_linear(std::vector<std::pair<double, double>> samples,
                                                   double search_bound = kDefaultSearchBound);
    static QuasiConvexHamiltonian from_function(std::function<double(double)> f,
                                                double search_bound = kDefaultSearchBound,
                                                std::optional<double> argmin_hint = std::nullopt,
                                                std::string label = "function");

    double operator()(double p) const { return eval_(p); }

    // leftmost minimizer inside [-search_bound, search_bound]
    double argmin() const { return p0_; }
    double min_value() const { return min_value_; }
    double search_bound() const { return search_bound_; }
    const std::string& label() const { return label_; }

    // monotone envelopes
    double envelope_minus(double q) const { return q <= p0_ ? eval_(q) : min_value_; }
    double envelope_plus(double q) const { return q >= p0_ ? eval_(q) : min_value_; }

    // root of H = lambda on the chosen monotone branch (pi^+/pi^-)
    double partial_inverse(double lambda, Branch side) const;

    // largest level reachable on a branch before the search bound
    double level_cap(Branch side) const;

    // evaluator shifted so the argmin sits at the origin and the minimum at
    // a chosen level; used by normalization identities
    QuasiConvexHamiltonian shifted(double slope_shift, double value_shift) const;

private:
    QuasiConvexHamiltonian() = default;
    void finalize(std::optional<double> argmin_hint);
    void validate_quasi_convexity() const;

    std::function<double(double)> eval_;
    double p0_ = 0.0;
    double min_value_ = 0.0;
    double search_bound_ = kDefaultSearchBound;
    std::string label_;
};

// generic leftmost minimizer of a quasi-convex function on [lo, hi]
double leftmost_minimizer(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

}  // namespace hjnet

#endif
