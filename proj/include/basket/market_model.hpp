#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "basket/errors.hpp"

namespace basket {

// ============================================================================
// Local volatility
// ============================================================================

// A deterministic volatility function sigma(t, S) together with its slope
// dsigma/dS. Built-in variants:
//   black_scholes(s):      sigma(t,S) = s * S
//   cev(alpha, beta):      sigma(t,S) = alpha * S^beta,  beta in (0, 1]
//   term_structure(t,v):   sigma(t,S) = interp(t) * S (piecewise-linear in t)
//   custom(...):           any user-supplied pair of callables
// Evaluations at S <= 0 clamp to zero so Monte Carlo paths absorbed at the
// origin stay there.
class LocalVolatility {
public:
    enum class Kind { BlackScholes, Cev, TermStructure, Custom };

    using Fn = std::function<double(double, double)>;

    static LocalVolatility black_scholes(double sigma_hat) {
        LocalVolatility v;
        v.kind_ = Kind::BlackScholes;
        v.alpha_ = sigma_hat;
        v.beta_ = 1.0;
        v.time_independent_ = true;
        return v;
    }

    static LocalVolatility cev(double alpha, double beta) {
        LocalVolatility v;
        v.kind_ = Kind::Cev;
        v.alpha_ = alpha;
        v.beta_ = beta;
        v.time_independent_ = true;
        return v;
    }

    // Piecewise-linear lognormal term structure: sigma(t,S) = s(t)*S with
    // s(t) interpolated between (times[i], sigmas[i]) and held flat outside.
    static LocalVolatility term_structure(std::vector<double> times,
                                          std::vector<double> sigmas) {
        LocalVolatility v;
        v.kind_ = Kind::TermStructure;
        v.ts_times_ = std::move(times);
        v.ts_sigmas_ = std::move(sigmas);
        v.time_independent_ = false;
        return v;
    }

    static LocalVolatility custom(Fn sigma, Fn slope, bool time_independent) {
        LocalVolatility v;
        v.kind_ = Kind::Custom;
        v.fn_value_ = std::move(sigma);
        v.fn_slope_ = std::move(slope);
        v.time_independent_ = time_independent;
        return v;
    }

    double value(double t, double s) const {
        if (s <= 0.0 && kind_ != Kind::Custom) return 0.0;
        switch (kind_) {
            case Kind::BlackScholes: return alpha_ * s;
            case Kind::Cev: return alpha_ * std::pow(s, beta_);
            case Kind::TermStructure: return ts_level(t) * s;
            case Kind::Custom: return fn_value_(t, s);
        }
        return 0.0;
    }

    double slope(double t, double s) const {
        if (s <= 0.0 && kind_ != Kind::Custom) return 0.0;
        switch (kind_) {
            case Kind::BlackScholes: return alpha_;
            case Kind::Cev: return alpha_ * beta_ * std::pow(s, beta_ - 1.0);
            case Kind::TermStructure: return ts_level(t);
            case Kind::Custom: return fn_slope_(t, s);
        }
        return 0.0;
    }

    bool time_independent() const { return time_independent_; }
    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::vector<double>& ts_times() const { return ts_times_; }
    const std::vector<double>& ts_sigmas() const { return ts_sigmas_; }

    // The closed-form module accepts anything that is exactly the lognormal
    // model sigma(t,S) = c*S.
    bool is_black_scholes() const {
        return kind_ == Kind::BlackScholes || (kind_ == Kind::Cev && beta_ == 1.0);
    }

private:
    double ts_level(double t) const {
        const auto& xs = ts_times_;
        const auto& ys = ts_sigmas_;
        if (xs.empty()) return 0.0;
        if (t <= xs.front()) return ys.front();
        if (t >= xs.back()) return ys.back();
        std::size_t i = 1;
        while (i < xs.size() && xs[i] < t) ++i;
        const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    }

    Kind kind_ = Kind::BlackScholes;
    double alpha_ = 0.0;
    double beta_ = 1.0;
    bool time_independent_ = true;
    std::vector<double> ts_times_;
    std::vector<double> ts_sigmas_;
    Fn fn_value_;
    Fn fn_slope_;
};

struct JumpDiffusionAsset {
    double spot = 0.0;       // S_i(0) > 0
    double jump_size = 0.0;  // h_i >= -1; -1 means default-to-zero on the first jump
    LocalVolatility vol;
};

// ============================================================================
// Correlation matrix
// ============================================================================

class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0)
        : n_(n), data_(n * n, fill) {}

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    // Unit diagonal, constant off-diagonal entries.
    static SquareMatrix equicorrelation(std::size_t n, double off_diag) {
        SquareMatrix m(n, off_diag);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// Plain Cholesky, lower factor. Returns nullopt when the matrix is not
// numerically positive definite.
inline std::optional<SquareMatrix> try_cholesky_lower(const SquareMatrix& m) {
    const std::size_t n = m.size();
    SquareMatrix L(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = m(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
            if (i == j) {
                if (sum <= 0.0) return std::nullopt;
                L(i, i) = std::sqrt(sum);
            } else {
                L(i, j) = sum / L(j, j);
            }
        }
    }
    return L;
}

// Rounded user matrices are often indefinite by a hair; a diagonal jitter of
// 1e-10 is accepted, anything worse is an error.
inline constexpr double kCorrelationJitter = 1e-10;

inline SquareMatrix cholesky_lower(const SquareMatrix& m) {
    if (auto L = try_cholesky_lower(m)) return *L;
    SquareMatrix jittered = m;
    for (std::size_t i = 0; i < m.size(); ++i) jittered(i, i) += kCorrelationJitter;
    if (auto L = try_cholesky_lower(jittered)) return *L;
    throw NumericalError("correlation matrix is not positive semidefinite");
}

// ============================================================================
// Basket
// ============================================================================

// Immutable description of the basket: assets, weights, Brownian correlation
// and the common jump intensity. The correlation diagonal is forced to 1 at
// construction.
struct BasketSpec {
    std::vector<JumpDiffusionAsset> assets;
    std::vector<double> weights;
    SquareMatrix correlation;
    double intensity = 0.0;  // lambda >= 0, jumps per unit time

    BasketSpec() = default;
    BasketSpec(std::vector<JumpDiffusionAsset> assets_, std::vector<double> weights_,
               SquareMatrix correlation_, double intensity_)
        : assets(std::move(assets_)),
          weights(std::move(weights_)),
          correlation(std::move(correlation_)),
          intensity(intensity_) {
        for (std::size_t i = 0; i < correlation.size(); ++i) correlation(i, i) = 1.0;
    }

    std::size_t size() const { return assets.size(); }

    double basket_spot() const {
        double s = 0.0;
        for (std::size_t i = 0; i < assets.size(); ++i) s += weights[i] * assets[i].spot;
        return s;
    }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void flag(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

inline ValidationReport validate_basket(const BasketSpec& spec) {
    ValidationReport report;
    const std::size_t n = spec.size();

    if (n == 0) report.flag("basket has no assets");
    if (spec.weights.size() != n)
        report.flag("weights length " + std::to_string(spec.weights.size()) +
                    " does not match asset count " + std::to_string(n));
    if (spec.correlation.size() != n)
        report.flag("correlation dimension " + std::to_string(spec.correlation.size()) +
                    " does not match asset count " + std::to_string(n));
    if (!(spec.intensity >= 0.0)) report.flag("jump intensity is negative");

    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = spec.assets[i];
        const std::string tag = "asset " + std::to_string(i) + ": ";
        if (!(a.spot > 0.0)) report.flag(tag + "initial price must be positive");
        if (!(a.jump_size >= -1.0)) report.flag(tag + "jump size below -1");
        if (i < spec.weights.size() && !(spec.weights[i] >= 0.0))
            report.flag(tag + "negative weight");
        if (a.vol.kind() == LocalVolatility::Kind::Cev ||
            a.vol.kind() == LocalVolatility::Kind::BlackScholes) {
            if (!(a.vol.alpha() >= 0.0)) report.flag(tag + "volatility coefficient negative");
            if (!(a.vol.beta() > 0.0 && a.vol.beta() <= 1.0))
                report.flag(tag + "CEV exponent outside (0, 1]");
        }
        if (a.spot > 0.0 && a.vol.value(0.0, a.spot) < 0.0)
            report.flag(tag + "volatility negative at the initial price");
    }

    if (spec.correlation.size() == n && n > 0) {
        bool entries_ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double r = spec.correlation(i, j);
                if (!(r >= -1.0 && r <= 1.0)) {
                    report.flag("correlation out of [-1,1] at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
                    entries_ok = false;
                }
                if (std::abs(r - spec.correlation(j, i)) > 1e-12) {
                    report.flag("correlation not symmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
                    entries_ok = false;
                }
            }
            if (std::abs(spec.correlation(i, i) - 1.0) > 1e-12) {
                report.flag("correlation diagonal not 1 at " + std::to_string(i));
                entries_ok = false;
            }
        }
        if (entries_ok) {
            try {
                cholesky_lower(spec.correlation);
            } catch (const NumericalError& e) {
                report.flag(e.what());
            }
        }
    }

    if (report.ok && !(spec.basket_spot() > 0.0)) report.flag("basket spot is not positive");
    return report;
}

// ============================================================================
// Volatility profiles at the initial prices
// ============================================================================

namespace detail {
inline void check_index(const BasketSpec& spec, std::size_t i) {
    if (i >= spec.size()) throw ModelError("asset index out of range");
}
}  // namespace detail

// sigma_i(t, S_i(0))
inline double sigma0(const BasketSpec& spec, std::size_t i, double t) {
    detail::check_index(spec, i);
    return spec.assets[i].vol.value(t, spec.assets[i].spot);
}

// dsigma_i/dS evaluated at (t, S_i(0))
inline double sigma1(const BasketSpec& spec, std::size_t i, double t) {
    detail::check_index(spec, i);
    return spec.assets[i].vol.slope(t, spec.assets[i].spot);
}

// tilde sigma_i^(k)(t) = sum_j w_j sigma_i^(k)(t) sigma_j^(0)(t) rho_ij
inline double tilde_sigma(const BasketSpec& spec, std::size_t i, int order, double t) {
    detail::check_index(spec, i);
    if (order != 0 && order != 1) throw ModelError("tilde_sigma order must be 0 or 1");
    const double own = (order == 0) ? sigma0(spec, i, t) : sigma1(spec, i, t);
    double sum = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j)
        sum += spec.weights[j] * sigma0(spec, j, t) * spec.correlation(i, j);
    return own * sum;
}

// True when every asset's volatility is flagged time independent, which
// unlocks the closed-form time integrals.
inline bool all_time_independent(const BasketSpec& spec) {
    for (const auto& a : spec.assets)
        if (!a.vol.time_independent()) return false;
    return true;
}

}  // namespace basket
