#include "hjnet/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "hjnet/errors.hpp"

namespace hjnet {

namespace {

constexpr int kScanPoints = 2049;
constexpr int kBisectionCap = 200;

}  // namespace

double leftmost_minimizer(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
    // coarse scan
    double best = f(lo);
    int besti = 0;
    std::vector<double> vals(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
        double p = lo + (hi - lo) * i / (kScanPoints - 1);
        vals[i] = f(p);
        if (vals[i] < best) {
            best = vals[i];
            besti = i;
        }
    }
    auto grid = [&](int i) { return lo + (hi - lo) * i / (kScanPoints - 1); };

    // golden-section refinement around the best grid point
    double a = grid(std::max(0, besti - 1));
    double b = grid(std::min(kScanPoints - 1, besti + 1));
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < kBisectionCap && (b - a) > tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    double xmin = 0.5 * (a + b);
    double vmin = std::min(best, f(xmin));

    // walk left across any flat plateau: find the leftmost point still at
    // the minimum level (up to a value slack)
    double slack = 1e-12 * (1.0 + std::abs(vmin));
    double left = lo, right = std::min(xmin, grid(besti));
    if (f(left) <= vmin + slack) return left;
    for (int it = 0; it < kBisectionCap && (right - left) > tol; ++it) {
        double mid = 0.5 * (left + right);
        if (f(mid) <= vmin + slack)
            right = mid;
        else
            left = mid;
    }
    return right;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::quadratic(double a, double center,
                                                         double min_value,
                                                         double search_bound) {
    if (!(a > 0.0)) throw ConfigError("quadratic Hamiltonian needs a > 0");
    QuasiConvexHamiltonian h;
    h.eval_ = [a, center, min_value](double p) {
        double d = p - center;
        return a * d * d + min_value;
    };
    h.search_bound_ = search_bound;
    h.label_ = "quadratic";
    h.finalize(center);
    return h;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::shifted_power(double a, double center,
                                                             double exponent, double min_value,
                                                             double search_bound) {
    if (!(a > 0.0)) throw ConfigError("shifted power Hamiltonian needs a > 0");
    if (!(exponent >= 1.0)) throw ConfigError("shifted power Hamiltonian needs exponent >= 1");
    QuasiConvexHamiltonian h;
    h.eval_ = [a, center, exponent, min_value](double p) {
        return a * std::pow(std::abs(p - center), exponent) + min_value;
    };
    h.search_bound_ = search_bound;
    h.label_ = "shifted_power";
    h.finalize(center);
    return h;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::piecewise_linear(
    std::vector<std::pair<double, double>> samples, double search_bound) {
    if (samples.size() < 2) throw ConfigError("piecewise-linear Hamiltonian needs >= 2 samples");
    std::sort(samples.begin(), samples.end());
    for (size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw ConfigError("piecewise-linear Hamiltonian: duplicate abscissae");
    QuasiConvexHamiltonian h;
    auto table = std::make_shared<std::vector<std::pair<double, double>>>(std::move(samples));
    h.eval_ = [table](double p) {
        const auto& t = *table;
        if (p <= t.front().first) {
            double s = (t[1].second - t[0].second) / (t[1].first - t[0].first);
            return t[0].second + s * (p - t[0].first);
        }
        if (p >= t.back().first) {
            size_t n = t.size();
            double s = (t[n - 1].second - t[n - 2].second) / (t[n - 1].first - t[n - 2].first);
            return t[n - 1].second + s * (p - t[n - 1].first);
        }
        auto it = std::upper_bound(t.begin(), t.end(), std::make_pair(p, 0.0),
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
        auto hi = *it;
        auto lo = *(it - 1);
        double w = (p - lo.first) / (hi.first - lo.first);
        return lo.second + w * (hi.second - lo.second);
    };
    h.search_bound_ = search_bound;
    h.label_ = "piecewise_linear";
    h.finalize(std::nullopt);
    return h;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::from_function(std::function<double(double)> f,
                                                             double search_bound,
                                                             std::optional<double> argmin_hint,
                                                             std::string label) {
    QuasiConvexHamiltonian h;
    h.eval_ = std::move(f);
    h.search_bound_ = search_bound;
    h.label_ = std::move(label);
    h.finalize(argmin_hint);
    return h;
}

void QuasiConvexHamiltonian::finalize(std::optional<double> argmin_hint) {
    if (!(search_bound_ > 0.0)) throw ConfigError("search bound must be positive");
    validate_quasi_convexity();
    if (argmin_hint) {
        p0_ = *argmin_hint;
    } else {
        p0_ = leftmost_minimizer(eval_, -search_bound_, search_bound_);
    }
    min_value_ = eval_(p0_);
}

void QuasiConvexHamiltonian::validate_quasi_convexity() const {
    // spot check on a grid: nonincreasing up to the sampled minimum,
    // nondecreasing after it
    const int n = 513;
    std::vector<double> v(n);
    int imin = 0;
    for (int i = 0; i < n; ++i) {
        double p = -search_bound_ + 2.0 * search_bound_ * i / (n - 1);
        v[i] = eval_(p);
        if (!std::isfinite(v[i]))
            throw InvalidHamiltonianError("Hamiltonian is not finite at p=" + std::to_string(p));
        if (v[i] < v[imin]) imin = i;
    }
    auto tol = [&](int i) { return 1e-9 * (1.0 + std::abs(v[i]) + std::abs(v[i - 1])); };
    for (int i = 1; i <= imin; ++i)
        if (v[i] > v[i - 1] + tol(i))
            throw InvalidHamiltonianError("sampled values rise before the minimum: not quasi-convex");
    for (int i = imin + 1; i < n; ++i)
        if (v[i] < v[i - 1] - tol(i))
            throw InvalidHamiltonianError("sampled values fall after the minimum: not quasi-convex");
}

double QuasiConvexHamiltonian::partial_inverse(double lambda, Branch side) const {
    if (lambda < min_value_ - 1e-12)
        throw BelowMinimumError("level " + std::to_string(lambda) + " below min H = " +
                                std::to_string(min_value_));
    lambda = std::max(lambda, min_value_);
    double scale = 1.0 + std::abs(lambda);
    if (lambda <= min_value_ + 1e-15 * scale) return p0_;

    double far = (side == Branch::plus) ? search_bound_ : -search_bound_;
    if (eval_(far) < lambda - 1e-12 * scale)
        throw SearchBoundError("level " + std::to_string(lambda) +
                               " not reached inside the search bound");
    // monotone branch: bisection keeps H(lo) < lambda <= H(hi)
    double lo = p0_, hi = far;
    for (int it = 0; it < kBisectionCap && std::abs(hi - lo) > 1e-14 * (1.0 + std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (eval_(mid) >= lambda)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double QuasiConvexHamiltonian::level_cap(Branch side) const {
    return eval_(side == Branch::plus ? search_bound_ : -search_bound_);
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::shifted(double slope_shift,
                                                       double value_shift) const {
    auto base = eval_;
    QuasiConvexHamiltonian h;
    h.eval_ = [base, slope_shift, value_shift](double p) {
        return base(p + slope_shift) - value_shift;
    };
    h.search_bound_ = search_bound_;
    h.label_ = label_ + "_shifted";
    h.p0_ = p0_ - slope_shift;
    h.min_value_ = min_value_ - value_shift;
    return h;
}

}  // namespace hjnet
