#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "basket/errors.hpp"
#include "basket/market_model.hpp"
#include "basket/quadrature.hpp"

namespace basket {

struct QuadratureConfig {
    int order = 64;          // Gauss-Legendre nodes per segment
    double rel_tol = 1e-9;   // refinement agreement required of the doubled rule
    bool force_quadrature = false;  // bypass the time-independent closed forms (testing)
};

// Time integrals of the weighted cross-volatility profiles, per asset:
//   i0 = int_0^T ts0_i(t) dt
//   i1 = int_0^T (T - t) ts0_i(t) dt
//   i2 = int_0^T t ts1_i(t) dt
//   i3 = int_0^T (int_0^t ts0_i(s) ds) ts1_i(t) dt
// where ts0_i / ts1_i are tilde_sigma(spec, i, 0|1, t). For time-independent
// volatilities these collapse to closed forms in T.
struct ProfileIntegrals {
    std::vector<double> i0;
    std::vector<double> i1;
    std::vector<double> i2;
    std::vector<double> i3;
};

struct ExpansionCoefficients {
    double variance = 0.0;   // v^2, the variance of the Gaussian conditioning variable
    double vol = 0.0;        // v
    double curvature = 0.0;  // coefficient of x^2 in the conditional quadratic
    ProfileIntegrals integrals;
};

// Coefficients of the conditional payoff quadratic
//   curvature * x^2 + slope * x + intercept
// for the jump-count slice k, with x standard normal.
struct QuadraticPayoff {
    std::int64_t jump_count = 0;
    double curvature = 0.0;  // c
    double slope = 0.0;      // a1(k)
    double intercept = 0.0;  // a0(k)
};

inline ProfileIntegrals profile_integrals(const BasketSpec& spec, double maturity,
                                          const QuadratureConfig& cfg = {}) {
    if (!(maturity > 0.0)) throw ModelError("maturity must be positive");
    const std::size_t n = spec.size();
    ProfileIntegrals out;
    out.i0.resize(n);
    out.i1.resize(n);
    out.i2.resize(n);
    out.i3.resize(n);

    if (all_time_independent(spec) && !cfg.force_quadrature) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ts0 = tilde_sigma(spec, i, 0, 0.0);
            const double ts1 = tilde_sigma(spec, i, 1, 0.0);
            const double t2h = 0.5 * maturity * maturity;
            out.i0[i] = ts0 * maturity;
            out.i1[i] = ts0 * t2h;
            out.i2[i] = ts1 * t2h;
            out.i3[i] = ts0 * ts1 * t2h;
        }
        return out;
    }

    // Composite Gauss-Legendre with one refinement doubling; disagreement
    // beyond rel_tol is reported as non-convergence.
    const auto integral = [&](const auto& f) {
        const double coarse = integrate_gl(f, 0.0, maturity, cfg.order);
        const double mid = 0.5 * maturity;
        const double fine =
            integrate_gl(f, 0.0, mid, cfg.order) + integrate_gl(f, mid, maturity, cfg.order);
        if (std::abs(fine - coarse) > cfg.rel_tol * (1.0 + std::abs(fine)))
            throw NumericalError("quadrature non-convergence in profile integrals");
        return fine;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto ts0 = [&](double t) { return tilde_sigma(spec, i, 0, t); };
        const auto ts1 = [&](double t) { return tilde_sigma(spec, i, 1, t); };
        // Cumulative inner integral of ts0, evaluated at the outer nodes with
        // the same rule on [0, t].
        const auto ts0_cum = [&](double t) { return integrate_gl(ts0, 0.0, t, cfg.order); };

        out.i0[i] = integral(ts0);
        out.i1[i] = integral([&](double t) { return (maturity - t) * ts0(t); });
        out.i2[i] = integral([&](double t) { return t * ts1(t); });
        out.i3[i] = integral([&](double t) { return ts0_cum(t) * ts1(t); });
    }
    return out;
}

inline ExpansionCoefficients expansion_coefficients(const BasketSpec& spec, double maturity,
                                                    const QuadratureConfig& cfg = {}) {
    ExpansionCoefficients coeffs;
    coeffs.integrals = profile_integrals(spec, maturity, cfg);

    double v2 = 0.0;
    double num = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        v2 += spec.weights[i] * coeffs.integrals.i0[i];
        num += spec.weights[i] * coeffs.integrals.i3[i];
    }

    const double spot = spec.basket_spot();
    if (!(v2 > 1e-12 * spot * spot))
        throw ModelError("degenerate volatility: conditioning variance is numerically zero");

    coeffs.variance = v2;
    coeffs.vol = std::sqrt(v2);
    coeffs.curvature = num / v2;
    return coeffs;
}

// Conditional quadratic for jump count k. `paper_literal_a0` reproduces the
// printed intercept, whose first-order jump term carries the strike instead
// of the jump count; it exists for comparison runs only.
inline QuadraticPayoff lba_quadratic(const ExpansionCoefficients& coeffs, const BasketSpec& spec,
                                     double maturity, double strike, std::int64_t k,
                                     bool paper_literal_a0 = false) {
    if (k < 0) throw ModelError("jump count must be nonnegative");

    const double lambda_t = spec.intensity * maturity;
    const double kd = static_cast<double>(k);

    double jump_drift = 0.0;   // sum_i w_i h_i S_i(0)
    double jump_convex = 0.0;  // sum_i w_i S_i(0) h_i^2
    double slope_sum = 0.0;    // sum_i w_i h_i (i1_i + S_i(0) i2_i)
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double w = spec.weights[i];
        const double h = spec.assets[i].jump_size;
        const double s0 = spec.assets[i].spot;
        jump_drift += w * h * s0;
        jump_convex += w * s0 * h * h;
        slope_sum += w * h * (coeffs.integrals.i1[i] + s0 * coeffs.integrals.i2[i]);
    }

    QuadraticPayoff q;
    q.jump_count = k;
    q.curvature = coeffs.curvature;
    q.slope = coeffs.vol + (kd / maturity - spec.intensity) * slope_sum / coeffs.vol;

    const double centered = kd - lambda_t;
    const double first_order = paper_literal_a0 ? (strike - lambda_t) : centered;
    q.intercept = spec.basket_spot() + first_order * jump_drift +
                  0.5 * jump_convex * (centered * centered - kd) - coeffs.curvature - strike;
    return q;
}

}  // namespace basket
