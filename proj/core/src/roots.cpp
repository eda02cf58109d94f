#include "brunesynth/roots.hpp"

#include <cmath>
#include <numbers>

namespace brunesynth {

namespace {

struct HullPoint {
    std::size_t i;
    double logmag;
};

// Starting points on circles whose radii come from the upper convex hull of (i, log|a_i|).
// Essential when coefficients span dozens of orders of magnitude.
std::vector<Complex> initial_guesses(const Poly<Real>& p) {
    std::vector<HullPoint> pts;
    for (std::size_t i = 0; i <= p.degree(); ++i) {
        if (p[i] != 0) pts.push_back({i, boost::multiprecision::log(boost::multiprecision::abs(p[i])).convert_to<double>()});
    }
    std::vector<HullPoint> hull;
    for (const auto& q : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            double cross = (static_cast<double>(b.i) - a.i) * (q.logmag - a.logmag) -
                           (b.logmag - a.logmag) * (static_cast<double>(q.i) - a.i);
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(q);
    }
    std::vector<Complex> z;
    z.reserve(p.degree());
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        std::size_t m = hull[k + 1].i - hull[k].i;
        double logr = (hull[k].logmag - hull[k + 1].logmag) / static_cast<double>(m);
        Real radius = boost::multiprecision::exp(Real(logr));
        double theta0 = two_pi * static_cast<double>(k) / static_cast<double>(hull.size()) + 0.4;
        for (std::size_t j = 0; j < m; ++j) {
            double th = two_pi * static_cast<double>(j) / static_cast<double>(m) + theta0;
            z.emplace_back(radius * Real(std::cos(th)), radius * Real(std::sin(th)));
        }
    }
    return z;
}

}  // namespace

std::vector<Complex> polynomial_roots(const Poly<Real>& input, const RootOptions& opt) {
    Poly<Real> p = input.normalized();
    std::vector<Complex> roots;
    if (p.is_zero()) throw ValidationError("roots of the zero polynomial are undefined");

    std::size_t zeros = 0;
    while (zeros < p.degree() && p[zeros] == 0) ++zeros;
    for (std::size_t k = 0; k < zeros; ++k) roots.emplace_back(Real(0), Real(0));
    if (zeros) {
        std::vector<Real> c(p.coeffs().begin() + static_cast<std::ptrdiff_t>(zeros), p.coeffs().end());
        p = Poly<Real>(std::move(c));
    }
    const std::size_t n = p.degree();
    if (n == 0) return roots;
    if (n == 1) {
        roots.emplace_back(-p[0] / p[1], Real(0));
        return roots;
    }

    std::vector<Complex> z = initial_guesses(p);
    std::vector<bool> done(n, false);
    const Real tol = working_epsilon() * Real(opt.step_tolerance_ulps);
    const Complex one(Real(1), Real(0));

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        bool all = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            auto [pv, dpv] = p.eval_with_derivative(z[i]);
            // Backward-error stop: |p(z)| is at the rounding level of Horner's rule.
            const Real az = std::abs(z[i]);
            if (std::abs(pv) <= tol * magnitude_on_circle(p, az)) {
                done[i] = true;
                continue;
            }
            Complex ratio = pv / dpv;
            Complex sum(Real(0), Real(0));
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) sum += one / (z[i] - z[j]);
            }
            Complex w = ratio / (one - ratio * sum);
            z[i] -= w;
            if (std::abs(w) <= tol * std::abs(z[i])) done[i] = true;
            else all = false;
        }
        if (all) break;
    }
    if (it == opt.max_iterations) {
        throw ConvergenceError("Aberth iteration did not converge for degree " + std::to_string(n));
    }
    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

}  // namespace brunesynth
