#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "basket/expansion.hpp"
#include "basket/math.hpp"
#include "basket/results.hpp"

namespace basket {

// How to truncate the Poisson mixture over jump counts. The paper's tests
// keep the first 10 terms; adaptive mode extends until the tail mass drops
// below tail_bound.
struct PoissonTruncation {
    enum class Mode { PaperCompat, Adaptive };

    Mode mode = Mode::Adaptive;
    double tail_bound = 1e-12;

    static PoissonTruncation paper_compat() { return {Mode::PaperCompat, 1e-12}; }
    static PoissonTruncation adaptive(double tail = 1e-12) { return {Mode::Adaptive, tail}; }

    std::int64_t resolve_kmax(double mean) const {
        if (mode == Mode::PaperCompat) return 9;
        return poisson_adaptive_kmax(mean, tail_bound);
    }
};

namespace detail {

// Partial second moments of a standard normal over [lo, hi]:
// returns (P(lo<x<hi), int x phi, int x^2 phi). Infinite endpoints allowed.
struct NormalSliceMoments {
    double mass;
    double first;
    double second;
};

inline NormalSliceMoments normal_slice(double lo, double hi) {
    const double cdf_lo = std::isinf(lo) ? (lo < 0 ? 0.0 : 1.0) : norm_cdf(lo);
    const double cdf_hi = std::isinf(hi) ? (hi < 0 ? 0.0 : 1.0) : norm_cdf(hi);
    const double pdf_lo = std::isinf(lo) ? 0.0 : norm_pdf(lo);
    const double pdf_hi = std::isinf(hi) ? 0.0 : norm_pdf(hi);
    const double xpdf_lo = std::isinf(lo) ? 0.0 : lo * pdf_lo;
    const double xpdf_hi = std::isinf(hi) ? 0.0 : hi * pdf_hi;
    NormalSliceMoments m;
    m.mass = cdf_hi - cdf_lo;
    m.first = pdf_lo - pdf_hi;
    m.second = m.mass + xpdf_lo - xpdf_hi;
    return m;
}

inline double quadratic_slice(double c, double a1, double a0, double lo, double hi) {
    const auto m = normal_slice(lo, hi);
    return c * m.second + a1 * m.first + a0 * m.mass;
}

}  // namespace detail

// E[(c x^2 + a1 x + a0)^+] for x standard normal, in closed form over the
// root intervals of the quadratic.
inline double positive_part_quadratic_expectation(double c, double a1, double a0) {
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Near-zero leading coefficient: treat as linear to avoid catastrophic
    // cancellation in the root formula.
    if (std::abs(c) < 1e-14 * (1.0 + std::abs(a0) + std::abs(a1))) {
        if (std::abs(a1) < 1e-14 * (1.0 + std::abs(a0))) return std::max(a0, 0.0);
        const double root = -a0 / a1;
        return a1 > 0.0 ? detail::quadratic_slice(0.0, a1, a0, root, inf)
                        : detail::quadratic_slice(0.0, a1, a0, -inf, root);
    }

    const double disc = a1 * a1 - 4.0 * c * a0;
    if (disc <= 0.0) {
        // No real roots: the quadratic keeps the sign of c everywhere.
        return c > 0.0 ? c + a0 : 0.0;
    }

    // Stable root pair via q = -(a1 + sign(a1) sqrt(disc)) / 2.
    const double sq = std::sqrt(disc);
    const double qv = -0.5 * (a1 + std::copysign(sq, a1 == 0.0 ? 1.0 : a1));
    double r1, r2;
    if (qv != 0.0) {
        r1 = qv / c;
        r2 = a0 / qv;
    } else {
        const double r = std::sqrt(-a0 / c);
        r1 = -r;
        r2 = r;
    }
    if (r1 > r2) std::swap(r1, r2);

    const double inside = detail::quadratic_slice(c, a1, a0, r1, r2);
    if (c > 0.0) return (c + a0) - inside;  // positive outside the roots
    return inside;                          // positive between the roots
}

struct LbaOptions {
    PoissonTruncation truncation = PoissonTruncation::adaptive();
    QuadratureConfig quadrature;
    bool paper_literal_a0 = false;
};

// Lower bound approximation: Poisson mixture over jump counts of the
// closed-form expectation of the positive part of the conditional quadratic.
inline PricingResult price_lba(const BasketSpec& spec, double maturity, double strike,
                               const LbaOptions& opts = {}) {
    if (!(strike >= 0.0)) throw ModelError("strike must be nonnegative");
    const auto coeffs = expansion_coefficients(spec, maturity, opts.quadrature);

    const double mean = spec.intensity * maturity;
    const std::int64_t k_max = opts.truncation.resolve_kmax(mean);

    PricingResult result;
    result.method = Method::Lba;

    double price = 0.0;
    double mass = 0.0;
    for (std::int64_t k = 0; k <= k_max; ++k) {
        const double pk = poisson_pmf(mean, k);
        const auto q = lba_quadratic(coeffs, spec, maturity, strike, k, opts.paper_literal_a0);
        price += pk * positive_part_quadratic_expectation(q.curvature, q.slope, q.intercept);
        mass += pk;
    }
    result.price = price;

    const double tail = 1.0 - mass;
    if (opts.truncation.mode == PoissonTruncation::Mode::PaperCompat && tail > 1e-6)
        result.warnings.push_back("poisson truncation: first 10 terms leave tail mass " +
                                  std::to_string(tail));
    return result;
}

}  // namespace basket
