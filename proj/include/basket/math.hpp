#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace basket {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2 = 1.4142135623730950488016887;

inline double norm_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Standard normal CDF via the complementary error function; relative error
// of erfc is at machine-precision level, well below every tolerance used
// by the pricing formulas.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

// Acklam's rational approximation of the inverse normal CDF,
// |relative error| < 1.15e-9 on (0,1). Used only for random variate
// generation; closed-form pricing never inverts the CDF.
inline double norm_inv(double p) {
    static constexpr double a[] = {-3.969683028665376e+01,  2.209460984245205e+02,
                                   -2.759285104469687e+02,  1.383577518672690e+02,
                                   -3.066479806614716e+01,  2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01,  1.615858368580409e+02,
                                   -1.556989798598866e+02,  6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = { 7.784695709041462e-03,  3.224671290700398e-01,
                                    2.445134137142996e+00,  3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// P(N = k) for N ~ Poisson(mean). Evaluated in log space so large k and
// large means do not overflow the k! term.
inline double poisson_pmf(double mean, std::int64_t k) {
    if (k < 0) return 0.0;
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-mean + static_cast<double>(k) * std::log(mean) -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

// Smallest k_max with Poisson(mean) tail mass below `tail_bound`, capped at
// mean + 12*sqrt(mean+1) + 20 which keeps the scan finite for any mean.
inline std::int64_t poisson_adaptive_kmax(double mean, double tail_bound = 1e-12) {
    const auto cap = static_cast<std::int64_t>(mean + 12.0 * std::sqrt(mean + 1.0) + 20.0);
    if (mean == 0.0) return 0;
    double cumulative = 0.0;
    for (std::int64_t k = 0; k <= cap; ++k) {
        cumulative += poisson_pmf(mean, k);
        if (1.0 - cumulative < tail_bound) return k;
    }
    return cap;
}

// E[(mu + s*Z - K)^+] for Z standard normal: the arithmetic (normal-model)
// call value.
inline double bachelier_call(double mu, double s, double strike) {
    if (s <= 0.0) return std::max(mu - strike, 0.0);
    const double d = (mu - strike) / s;
    return (mu - strike) * norm_cdf(d) + s * norm_pdf(d);
}

}  // namespace basket
