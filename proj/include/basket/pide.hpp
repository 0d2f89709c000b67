#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "basket/errors.hpp"
#include "basket/market_model.hpp"
#include "basket/quadrature.hpp"
#include "basket/results.hpp"

namespace basket {

// Linearized local variance sigma(T,K)^2 ~ a(T) + b(T) (K - S(0)) and its
// constituents, all at the requested maturity.
struct LocalVarianceApprox {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> p;    // p_i = sigma_i(T, S_i(0))
    std::vector<double> q;    // q_i = dsigma_i/dS at (T, S_i(0))
    std::vector<double> c_i;  // C_i = sum_j w_j rho_ij int_0^T sigma_i sigma_j dt
    double sigma_c2 = 0.0;    // sum_i w_i C_i
};

namespace detail {

inline double common_jump_size(const BasketSpec& spec) {
    const double h = spec.assets.empty() ? 0.0 : spec.assets.front().jump_size;
    for (const auto& asset : spec.assets)
        if (std::abs(asset.jump_size - h) > 1e-14)
            throw ModelError("the PIDE approximation requires one common jump size");
    return h;
}

inline std::vector<double> pairwise_vol_integrals(const BasketSpec& spec, double t) {
    const std::size_t n = spec.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double integral;
            if (spec.assets[i].vol.time_independent() && spec.assets[j].vol.time_independent()) {
                integral = sigma0(spec, i, 0.0) * sigma0(spec, j, 0.0) * t;
            } else {
                integral = integrate_smooth(
                    [&](double s) { return sigma0(spec, i, s) * sigma0(spec, j, s); }, 0.0, t,
                    1e-10);
            }
            c[i] += spec.weights[j] * spec.correlation(i, j) * integral;
        }
    }
    return c;
}

}  // namespace detail

// Coefficients of the linearized local variance at maturity `t`. The
// `paper_literal_sigma_c` switch freezes the unbound index of the printed
// sigma_c^2 display to the last asset; it exists for comparison only.
inline LocalVarianceApprox local_variance_coefficients(const BasketSpec& spec, double t,
                                                       bool paper_literal_sigma_c = false) {
    detail::common_jump_size(spec);
    const std::size_t n = spec.size();

    LocalVarianceApprox lv;
    lv.p.resize(n);
    lv.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        lv.p[i] = sigma0(spec, i, t);
        lv.q[i] = sigma1(spec, i, t);
    }
    lv.c_i = detail::pairwise_vol_integrals(spec, t);

    lv.sigma_c2 = 0.0;
    if (paper_literal_sigma_c) {
        for (std::size_t i = 0; i < n; ++i) lv.sigma_c2 += spec.weights[i] * lv.c_i[n - 1];
    } else {
        for (std::size_t i = 0; i < n; ++i) lv.sigma_c2 += spec.weights[i] * lv.c_i[i];
    }
    if (!(lv.sigma_c2 > 0.0))
        throw ModelError("degenerate volatility: sigma_c^2 vanishes, slope b(T) undefined");

    double a = 0.0;
    double b_num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double wwr = spec.weights[i] * spec.weights[j] * spec.correlation(i, j);
            a += wwr * lv.p[i] * lv.p[j];
            // p_i p_j (q_i/p_i C_i + q_j/p_j C_j) expanded to avoid 0/0
            b_num += wwr * (lv.p[j] * lv.q[i] * lv.c_i[i] + lv.p[i] * lv.q[j] * lv.c_i[j]);
        }
    }
    lv.a = a;
    lv.b = b_num / lv.sigma_c2;
    return lv;
}

struct PideConfig {
    int strike_cells = 400;        // grid intervals on [0, K_max]
    int time_cells_per_year = 400;
    double strike_max_mult = 5.0;  // K_max = mult * S(0)
    bool paper_literal_sigma_c = false;
};

struct PideSolution {
    double price = 0.0;               // interpolated at the requested strike
    std::vector<double> strikes;      // grid
    std::vector<double> values;       // C(T, .) on the grid
    std::int64_t floored_nodes = 0;   // grid points where a + b(K - S0) < 0 was clipped
    double min_variance_seen = 0.0;   // most negative pre-floor variance encountered
    std::int64_t monotonicity_violations = 0;  // layers x nodes with C increasing in K
    std::vector<std::string> warnings;
};

// Forward march of C_T = lambda h K C_K + (1/2) sigma(T,K)^2 C_KK
//                        + lambda (h+1) (C(T, K/(h+1)) - C(T,K))
// from C(0,K) = (S(0)-K)^+: local terms implicit (tridiagonal solve),
// nonlocal jump term explicit with linear interpolation.
inline PideSolution solve_pide(const BasketSpec& spec, double maturity, double strike,
                               const PideConfig& cfg = {}) {
    const double h = detail::common_jump_size(spec);
    const double lambda = spec.intensity;
    const double spot = spec.basket_spot();

    const int n_k = cfg.strike_cells;
    const double k_max = cfg.strike_max_mult * spot;
    const double dk = k_max / n_k;

    // Explicit jump term needs dt <= 1/(2 lambda (1+|h|)).
    int n_t = std::max(1, static_cast<int>(std::ceil(cfg.time_cells_per_year * maturity)));
    if (lambda > 0.0) {
        const double dt_cap = 1.0 / (2.0 * lambda * (1.0 + std::abs(h)));
        n_t = std::max(n_t, static_cast<int>(std::ceil(maturity / dt_cap)));
    }
    const double dt = maturity / n_t;

    PideSolution sol;
    sol.strikes.resize(static_cast<std::size_t>(n_k) + 1);
    for (int j = 0; j <= n_k; ++j) sol.strikes[static_cast<std::size_t>(j)] = j * dk;

    std::vector<double> cur(sol.strikes.size());
    for (std::size_t j = 0; j < cur.size(); ++j) cur[j] = std::max(spot - sol.strikes[j], 0.0);

    const auto interp = [&](const std::vector<double>& layer, double k) {
        if (k >= k_max) return 0.0;
        if (k <= 0.0) return layer.front();
        const double pos = k / dk;
        const auto j = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(j);
        return (1.0 - w) * layer[j] + w * layer[j + 1];
    };

    std::vector<double> sub(cur.size()), diag(cur.size()), sup(cur.size()), rhs(cur.size());
    std::vector<double> next(cur.size());
    const std::size_t last = cur.size() - 1;

    for (int step = 1; step <= n_t; ++step) {
        const double t_new = maturity * step / n_t;
        const auto lv = local_variance_coefficients(spec, t_new, cfg.paper_literal_sigma_c);

        // Dirichlet rows: C(t, 0) = S(0) (martingale), C(t, K_max) = 0.
        sub[0] = 0.0; diag[0] = 1.0; sup[0] = 0.0; rhs[0] = spot;
        sub[last] = 0.0; diag[last] = 1.0; sup[last] = 0.0; rhs[last] = 0.0;

        for (std::size_t j = 1; j < last; ++j) {
            const double k = sol.strikes[j];
            double var = lv.a + lv.b * (k - spot);
            if (var < 0.0) {
                ++sol.floored_nodes;
                sol.min_variance_seen = std::min(sol.min_variance_seen, var);
                var = 0.0;
            }
            const double diff = 0.5 * var;
            const double vel = lambda * h * k;

            double lo, mid, hi;  // operator coefficients on C_{j-1}, C_j, C_{j+1}
            if (std::abs(vel) * dk <= 2.0 * diff) {
                // central differencing, diffusion dominates
                lo = diff / (dk * dk) - vel / (2.0 * dk);
                hi = diff / (dk * dk) + vel / (2.0 * dk);
                mid = -2.0 * diff / (dk * dk);
            } else if (vel > 0.0) {  // upwind
                lo = diff / (dk * dk);
                hi = diff / (dk * dk) + vel / dk;
                mid = -2.0 * diff / (dk * dk) - vel / dk;
            } else {
                lo = diff / (dk * dk) - vel / dk;
                hi = diff / (dk * dk);
                mid = -2.0 * diff / (dk * dk) + vel / dk;
            }

            sub[j] = -dt * lo;
            diag[j] = 1.0 - dt * mid;
            sup[j] = -dt * hi;

            double jump_term;
            if (1.0 + h > 1e-14) {
                jump_term = lambda * (1.0 + h) * (interp(cur, k / (1.0 + h)) - cur[j]);
            } else {
                jump_term = -lambda * cur[j];  // total default: price jumps to zero
            }
            rhs[j] = cur[j] + dt * jump_term;
        }

        // Thomas solve
        for (std::size_t j = 1; j < cur.size(); ++j) {
            const double w = sub[j] / diag[j - 1];
            diag[j] -= w * sup[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        next[last] = rhs[last] / diag[last];
        for (std::size_t j = last; j-- > 0;) next[j] = (rhs[j] - sup[j] * next[j + 1]) / diag[j];

        double max_prev = 0.0, max_next = 0.0;
        for (std::size_t j = 0; j < cur.size(); ++j) {
            max_prev = std::max(max_prev, std::abs(cur[j]));
            max_next = std::max(max_next, std::abs(next[j]));
        }
        if (max_next > 10.0 * std::max(max_prev, 1e-8))
            throw NumericalError("PIDE instability: layer max-norm grew by >10x at t=" +
                                 std::to_string(t_new));

        for (std::size_t j = 0; j + 1 < cur.size(); ++j)
            if (next[j + 1] - next[j] > 1e-8) ++sol.monotonicity_violations;

        cur.swap(next);
    }

    sol.values = cur;
    sol.price = interp(cur, strike);
    if (sol.floored_nodes > 0)
        sol.warnings.push_back("local variance floored at " + std::to_string(sol.floored_nodes) +
                               " grid evaluations (most negative " +
                               std::to_string(sol.min_variance_seen) + ")");
    if (sol.monotonicity_violations > 0)
        sol.warnings.push_back("monotonicity in strike violated at " +
                               std::to_string(sol.monotonicity_violations) + " nodes");
    return sol;
}

inline PricingResult to_pricing_result(const PideSolution& sol) {
    PricingResult r;
    r.method = Method::Aea;
    r.price = sol.price;
    r.warnings = sol.warnings;
    return r;
}

}  // namespace basket
