#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "basket/errors.hpp"

namespace basket {

// Gauss-Legendre nodes and weights on [-1, 1], computed once per order by
// Newton iteration on the Legendre recurrence and cached.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussLegendreRule& gauss_legendre(int n) {
    static std::map<int, GaussLegendreRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess for the i-th root.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Fixed-order Gauss-Legendre integral of f over [lo, hi].
template <typename F>
double integrate_gl(const F& f, double lo, double hi, int order = 64) {
    if (hi <= lo) return 0.0;
    const auto& rule = gauss_legendre(order);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

// Composite Gauss-Legendre with interval doubling until two successive
// refinements agree to rel_tol. Intended for smooth integrands; kinked
// integrands must be split at the kink by the caller.
template <typename F>
double integrate_smooth(const F& f, double lo, double hi, double rel_tol = 1e-10,
                        int order = 32, int max_doublings = 12) {
    if (hi <= lo) return 0.0;
    double prev = integrate_gl(f, lo, hi, order);
    int segments = 2;
    for (int level = 0; level < max_doublings; ++level, segments *= 2) {
        double cur = 0.0;
        const double h = (hi - lo) / segments;
        for (int s = 0; s < segments; ++s)
            cur += integrate_gl(f, lo + s * h, lo + (s + 1) * h, order);
        if (std::abs(cur - prev) <= rel_tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw NumericalError("quadrature failure: composite Gauss-Legendre did not converge");
}

namespace detail {

// Bisect a bracketing sign change of g down to ~1e-13 interval width.
template <typename G>
double bisect_root(const G& g, double lo, double hi) {
    double flo = g(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Integral of max(g(x), 0) * weight(x) over [lo, hi], where g may change
// sign finitely many times. Sign changes are located on a scan grid,
// bisected, and each sign-definite piece is integrated as a smooth
// integrand.
template <typename G, typename W>
double integrate_positive_part(const G& g, const W& weight, double lo, double hi,
                               double rel_tol = 1e-10, int scan_points = 256) {
    if (hi <= lo) return 0.0;
    std::vector<double> cuts{lo};
    const double h = (hi - lo) / scan_points;
    double x_prev = lo;
    double g_prev = g(lo);
    for (int i = 1; i <= scan_points; ++i) {
        const double x = (i == scan_points) ? hi : lo + i * h;
        const double gx = g(x);
        if ((g_prev <= 0.0) != (gx <= 0.0))
            cuts.push_back(detail::bisect_root(g, x_prev, x));
        x_prev = x;
        g_prev = gx;
    }
    cuts.push_back(hi);

    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (b - a < 1e-14) continue;
        if (g(0.5 * (a + b)) <= 0.0) continue;
        total += integrate_smooth([&](double x) { return g(x) * weight(x); }, a, b, rel_tol);
    }
    return total;
}

}  // namespace basket
