#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "basket/expansion.hpp"
#include "basket/market_model.hpp"
#include "basket/math.hpp"
#include "basket/quadrature.hpp"
#include "basket/results.hpp"

namespace basket {

// ============================================================================
// Lognormal-with-jumps parameters
// ============================================================================

// One parameter set over a subset of the assets. Conditional on the jump
// count k and the Gaussian projection y, every moment of S(T) is a finite
// sum over these vectors.
struct JumpSliceParams {
    std::vector<double> a;           // a_i = w_i S_i(0) exp((-sigma_i^2/2 - h_i lambda) T)
    std::vector<double> sigma_hat;   // lognormal volatilities
    std::vector<double> proj;        // R_i, regression of sigma_i W_i(T) on the projection
    std::vector<double> one_plus_h;  // 1 + h_i
    std::vector<std::size_t> index;  // positions in the originating spec
    double sigma_b = 0.0;            // stdev of the linear lower bound's Gaussian part
    double m = 0.0;                  // sum a_i ln(1 + h_i), finite terms only
    double c_const = 0.0;            // sum a_i
};

// Parameters of the terminal-price decomposition for the Black-Scholes jump
// model. `full` covers every asset and prices the no-jump slice k = 0 (the
// exp(0 ln 0) = 1 convention); `survivors` excludes assets with h_i = -1 and
// prices every slice k >= 1. Without defaults the two coincide.
struct JumpLognormalParams {
    JumpSliceParams full;
    JumpSliceParams survivors;
    bool has_defaults = false;
    double maturity = 0.0;
    double strike = 0.0;

    const JumpSliceParams& slice(std::int64_t k) const {
        return (has_defaults && k >= 1) ? survivors : full;
    }

    // Threshold d_k = (K - c - m k) / sigma_b of the linear lower bound.
    double threshold(std::int64_t k) const {
        const auto& s = slice(k);
        return (strike - s.c_const - s.m * static_cast<double>(k)) / s.sigma_b;
    }
};

namespace detail {

inline JumpSliceParams build_slice(const BasketSpec& spec, double maturity,
                                   const std::vector<std::size_t>& indices) {
    JumpSliceParams s;
    s.index = indices;
    const std::size_t n = indices.size();
    s.a.resize(n);
    s.sigma_hat.resize(n);
    s.one_plus_h.resize(n);
    s.proj.assign(n, 0.0);

    for (std::size_t p = 0; p < n; ++p) {
        const auto& asset = spec.assets[indices[p]];
        const double sh = asset.vol.alpha();  // sigma(t,S) = alpha * S
        s.sigma_hat[p] = sh;
        s.one_plus_h[p] = 1.0 + asset.jump_size;
        s.a[p] = spec.weights[indices[p]] * asset.spot *
                 std::exp((-0.5 * sh * sh - asset.jump_size * spec.intensity) * maturity);
        s.c_const += s.a[p];
        if (s.one_plus_h[p] > 0.0) s.m += s.a[p] * std::log(s.one_plus_h[p]);
    }

    double var = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            var += s.a[p] * s.a[q] * spec.correlation(indices[p], indices[q]) * s.sigma_hat[p] *
                   s.sigma_hat[q] * maturity;
    s.sigma_b = std::sqrt(std::max(var, 0.0));

    if (s.sigma_b > 0.0) {
        for (std::size_t p = 0; p < n; ++p) {
            double cov = 0.0;
            for (std::size_t q = 0; q < n; ++q)
                cov += s.a[q] * spec.correlation(indices[p], indices[q]) * s.sigma_hat[p] *
                       s.sigma_hat[q] * maturity;
            s.proj[p] = cov / s.sigma_b;
        }
    }
    return s;
}

inline void require_black_scholes(const BasketSpec& spec) {
    for (const auto& asset : spec.assets)
        if (!asset.vol.is_black_scholes())
            throw ModelError("closed-form pricing requires sigma(t,S) = sigma*S for every asset");
}

}  // namespace detail

inline JumpLognormalParams terminal_price_params(const BasketSpec& spec, double maturity,
                                                 double strike) {
    detail::require_black_scholes(spec);
    if (!(maturity > 0.0)) throw ModelError("maturity must be positive");

    JumpLognormalParams params;
    params.maturity = maturity;
    params.strike = strike;

    std::vector<std::size_t> all(spec.size());
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        all[i] = i;
        if (spec.assets[i].jump_size > -1.0) alive.push_back(i);
    }
    params.has_defaults = alive.size() != all.size();
    params.full = detail::build_slice(spec, maturity, all);
    params.survivors =
        params.has_defaults ? detail::build_slice(spec, maturity, alive) : params.full;
    return params;
}

// E[S(T) | N(T) = k, projection = y].
inline double conditional_expectation(const JumpLognormalParams& params, std::int64_t k,
                                      double y) {
    const auto& s = params.slice(k);
    const double T = params.maturity;
    double sum = 0.0;
    for (std::size_t p = 0; p < s.a.size(); ++p) {
        const double expo = 0.5 * (s.sigma_hat[p] * s.sigma_hat[p] * T - s.proj[p] * s.proj[p]) +
                            s.proj[p] * y;
        // pow(0, 0) = 1 covers the defaulted-asset k = 0 convention.
        sum += s.a[p] * std::exp(expo) * std::pow(s.one_plus_h[p], static_cast<double>(k));
    }
    return sum;
}

namespace detail {

// Conditional second moment E[S(T)^2 | N(T)=k, projection=y] on a slice.
inline double conditional_second_moment(const JumpLognormalParams& params, std::int64_t k,
                                        const BasketSpec& spec, double y) {
    const auto& s = params.slice(k);
    const double T = params.maturity;
    const double kd = static_cast<double>(k);
    double sum = 0.0;
    for (std::size_t p = 0; p < s.a.size(); ++p) {
        for (std::size_t q = 0; q < s.a.size(); ++q) {
            const double rs = s.proj[p] + s.proj[q];
            const double var_pair = s.sigma_hat[p] * s.sigma_hat[p] * T +
                                    s.sigma_hat[q] * s.sigma_hat[q] * T +
                                    2.0 * spec.correlation(s.index[p], s.index[q]) *
                                        s.sigma_hat[p] * s.sigma_hat[q] * T -
                                    rs * rs;
            sum += s.a[p] * s.a[q] * std::pow(s.one_plus_h[p], kd) *
                   std::pow(s.one_plus_h[q], kd) * std::exp(rs * y + 0.5 * var_pair);
        }
    }
    return sum;
}

inline double conditional_variance(const JumpLognormalParams& params, std::int64_t k,
                                   const BasketSpec& spec, double y) {
    const double ce = conditional_expectation(params, k, y);
    return std::max(0.0, conditional_second_moment(params, k, spec, y) - ce * ce);
}

// The Gaussian projection beyond |y| = 12 carries no mass at the tolerances
// used here.
inline constexpr double kProjectionRange = 12.0;

// Poisson cutoff that also absorbs the (1+h)^k growth of the per-slice
// payoffs, so value-series tails stay below ~1e-12 of the total.
inline std::int64_t value_series_kmax(const BasketSpec& spec, double maturity) {
    double growth = 1.0;
    for (const auto& asset : spec.assets) growth = std::max(growth, 1.0 + asset.jump_size);
    return poisson_adaptive_kmax(spec.intensity * maturity * growth, 1e-13);
}

}  // namespace detail

// ============================================================================
// Rogers-Shi bounds, PEA
// ============================================================================

// Exact lower bound E[(E[S(T)|Lambda] - K)^+] for the Black-Scholes jump
// model, conditioning on (jump count, Gaussian projection).
inline PricingResult price_lb_exact(const BasketSpec& spec, double maturity, double strike) {
    const auto params = terminal_price_params(spec, maturity, strike);
    const double mean = spec.intensity * maturity;
    const std::int64_t k_max = detail::value_series_kmax(spec, maturity);

    double price = 0.0;
    for (std::int64_t k = 0; k <= k_max; ++k) {
        const double pk = poisson_pmf(mean, k);
        if (pk == 0.0) continue;
        const auto& s = params.slice(k);
        double slice_value;
        if (s.sigma_b > 0.0) {
            slice_value = integrate_positive_part(
                [&](double y) { return conditional_expectation(params, k, y) - strike; },
                [](double y) { return norm_pdf(y); }, -detail::kProjectionRange,
                detail::kProjectionRange);
        } else {
            slice_value = std::max(conditional_expectation(params, k, 0.0) - strike, 0.0);
        }
        price += pk * slice_value;
    }

    PricingResult result;
    result.method = Method::LbExact;
    result.price = price;
    return result;
}

namespace detail {

struct TailVariance {
    double var_mass = 0.0;  // E[var(S(T)|Lambda) 1_{Lambda < d}]
    double mass = 0.0;      // E[1_{Lambda < d}]
};

inline TailVariance below_threshold_variance(const BasketSpec& spec,
                                             const JumpLognormalParams& params) {
    const double mean = spec.intensity * params.maturity;
    const std::int64_t k_max = value_series_kmax(spec, params.maturity);
    TailVariance tv;
    for (std::int64_t k = 0; k <= k_max; ++k) {
        const double pk = poisson_pmf(mean, k);
        if (pk == 0.0) continue;
        const auto& s = params.slice(k);
        if (s.sigma_b > 0.0) {
            const double dk = params.threshold(k);
            if (dk <= -kProjectionRange) continue;
            const double hi = std::min(dk, kProjectionRange);
            tv.mass += pk * norm_cdf(dk);
            tv.var_mass += pk * integrate_smooth(
                                    [&](double y) {
                                        return conditional_variance(params, k, spec, y) *
                                               norm_pdf(y);
                                    },
                                    -kProjectionRange, hi);
        } else {
            // Degenerate projection: the indicator is constant per slice and
            // the conditional variance is zero.
            if (s.c_const + s.m * static_cast<double>(k) < params.strike) tv.mass += pk;
        }
    }
    return tv;
}

}  // namespace detail

// Rogers-Shi upper bound: LB + (1/2) E[var(S(T)|L) 1]^{1/2} E[1]^{1/2}.
inline PricingResult price_upper_bound(const BasketSpec& spec, double maturity, double strike) {
    const auto lb = price_lb_exact(spec, maturity, strike);
    const auto params = terminal_price_params(spec, maturity, strike);
    const auto tv = detail::below_threshold_variance(spec, params);

    PricingResult result;
    result.method = Method::UpperBound;
    result.price = lb.price + 0.5 * std::sqrt(std::max(tv.var_mass, 0.0)) *
                                  std::sqrt(std::max(tv.mass, 0.0));
    return result;
}

// Partial exact approximation: exact expectation on the region where the
// linear lower bound clears the strike, three-point moment-matched
// correction elsewhere.
inline PricingResult price_pea(const BasketSpec& spec, double maturity, double strike) {
    const auto params = terminal_price_params(spec, maturity, strike);
    const double mean = spec.intensity * maturity;
    const std::int64_t k_max = detail::value_series_kmax(spec, maturity);

    // epsilon_0^2: conditional variance of S(T) averaged over the region
    // below the threshold (see README for the reconstruction).
    const auto tv = detail::below_threshold_variance(spec, params);
    const double eps0 = tv.mass > 0.0 ? std::sqrt(std::max(tv.var_mass, 0.0) / tv.mass) : 0.0;

    static constexpr double q_weights[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
    const double shifts[3] = {-std::sqrt(3.0) * eps0, 0.0, std::sqrt(3.0) * eps0};

    double price = 0.0;
    for (std::int64_t k = 0; k <= k_max; ++k) {
        const double pk = poisson_pmf(mean, k);
        if (pk == 0.0) continue;
        const auto& s = params.slice(k);
        const double T = params.maturity;
        const double kd = static_cast<double>(k);

        if (s.sigma_b > 0.0) {
            const double dk = params.threshold(k);
            // Exact part: E[(S(T) - K) 1_{y >= d_k} | N = k].
            double exact = -strike * norm_cdf(-dk);
            for (std::size_t p = 0; p < s.a.size(); ++p)
                exact += s.a[p] * std::pow(s.one_plus_h[p], kd) *
                         std::exp(0.5 * s.sigma_hat[p] * s.sigma_hat[p] * T) *
                         norm_cdf(s.proj[p] - dk);
            price += pk * exact;

            // Moment-matched part on y < d_k.
            if (dk > -detail::kProjectionRange) {
                const double hi = std::min(dk, detail::kProjectionRange);
                for (int m = 0; m < 3; ++m) {
                    const double alpha = shifts[m];
                    price += pk * q_weights[m] *
                             integrate_positive_part(
                                 [&](double y) {
                                     return conditional_expectation(params, k, y) + alpha -
                                            strike;
                                 },
                                 [](double y) { return norm_pdf(y); },
                                 -detail::kProjectionRange, hi);
                }
            }
        } else {
            // Constant slice: either fully exact or fully in the corrected
            // region.
            const double ce = conditional_expectation(params, k, 0.0);
            if (s.c_const + s.m * kd >= strike) {
                price += pk * (ce - strike);
            } else {
                for (int m = 0; m < 3; ++m)
                    price += pk * q_weights[m] * std::max(ce + shifts[m] - strike, 0.0);
            }
        }
    }

    PricingResult result;
    result.method = Method::Pea;
    result.price = price;
    return result;
}

// ============================================================================
// First-order expansion price (control variate mean)
// ============================================================================

// Price of (S(0) + S^(1)(T) - K)^+: a Bachelier value mixed over the Poisson
// jump count. Valid for any local volatility model; a vanishing conditioning
// variance is fine here since nothing divides by it.
inline PricingResult price_first_order_cv(const BasketSpec& spec, double maturity, double strike,
                                          const QuadratureConfig& quad = {}) {
    const auto integrals = profile_integrals(spec, maturity, quad);
    double v2 = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) v2 += spec.weights[i] * integrals.i0[i];
    const double vol = std::sqrt(std::max(v2, 0.0));

    const double mean = spec.intensity * maturity;
    const std::int64_t k_max = poisson_adaptive_kmax(mean, 1e-13);

    double jump_drift = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        jump_drift += spec.weights[i] * spec.assets[i].jump_size * spec.assets[i].spot;

    const double spot = spec.basket_spot();
    double price = 0.0;
    for (std::int64_t k = 0; k <= k_max; ++k) {
        const double mu_k = spot + (static_cast<double>(k) - mean) * jump_drift;
        price += poisson_pmf(mean, k) * bachelier_call(mu_k, vol, strike);
    }

    PricingResult result;
    result.method = Method::FirstOrderCv;
    result.price = price;
    return result;
}

// ============================================================================
// Black-Scholes toolkit (zero rates)
// ============================================================================

inline double bs_call(double spot, double strike, double maturity, double sigma) {
    if (!(spot > 0.0 && strike > 0.0 && maturity > 0.0))
        throw ModelError("bs_call requires positive spot, strike and maturity");
    const double sig_sqrt_t = sigma * std::sqrt(maturity);
    if (sig_sqrt_t <= 0.0) return std::max(spot - strike, 0.0);
    const double d1 = (std::log(spot / strike) + 0.5 * sig_sqrt_t * sig_sqrt_t) / sig_sqrt_t;
    const double d2 = d1 - sig_sqrt_t;
    return spot * norm_cdf(d1) - strike * norm_cdf(d2);
}

inline double implied_vol(double price, double spot, double strike, double maturity) {
    if (!(spot > 0.0 && strike > 0.0 && maturity > 0.0))
        throw ModelError("implied_vol requires positive spot, strike and maturity");
    const double intrinsic = std::max(spot - strike, 0.0);
    if (!(price > intrinsic && price < spot))
        throw ModelError("price outside the no-arbitrage band for a call");

    double lo = 1e-6, hi = 5.0;
    if (bs_call(spot, strike, maturity, lo) > price) return lo;
    if (bs_call(spot, strike, maturity, hi) < price) throw ModelError("implied vol above 500%");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double diff = bs_call(spot, strike, maturity, mid) - price;
        if (std::abs(diff) < 1e-10 && hi - lo < 1e-10) return mid;
        (diff > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace basket
