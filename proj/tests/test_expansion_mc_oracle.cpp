// Simulates the first- and second-order expansion processes pathwise on a
// fine grid, conditions on the jump count by construction, and regresses the
// approximate basket value on the scaled conditioning variable. The fitted
// quadratic must agree with the closed-form coefficients.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "basket/expansion.hpp"
#include "basket/math.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace basket;
namespace bt = basket::testing;

namespace {

struct ExpansionSample {
    double approx_value;  // S(0) + S1(T) + S2(T)/2
    double x;             // Delta(T) / v
};

ExpansionSample simulate_expansion_path(const BasketSpec& spec, double maturity,
                                        std::int64_t jumps, double vol_of_delta,
                                        std::mt19937_64& rng, int steps) {
    const std::size_t n = spec.size();
    const auto chol = cholesky_lower(spec.correlation);
    const auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    };

    std::vector<double> jump_times(static_cast<std::size_t>(jumps));
    for (auto& t : jump_times) t = uniform() * maturity;
    std::sort(jump_times.begin(), jump_times.end());

    std::vector<double> grid;
    for (int m = 0; m <= steps; ++m) grid.push_back(maturity * m / steps);
    grid.insert(grid.end(), jump_times.begin(), jump_times.end());
    std::sort(grid.begin(), grid.end());

    std::vector<double> s1(n, 0.0), s1_time_integral(n, 0.0), s2_stoch(n, 0.0),
        s2_jump(n, 0.0);
    double delta = 0.0;

    std::size_t jump_cursor = 0;
    std::vector<double> z(n), dw(n);
    for (std::size_t seg = 0; seg + 1 < grid.size(); ++seg) {
        const double t0 = grid[seg];
        const double dt = grid[seg + 1] - grid[seg];
        if (dt > 1e-15) {
            for (auto& zi : z) zi = norm_inv(uniform());
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j <= i; ++j) acc += chol(i, j) * z[j];
                dw[i] = acc * std::sqrt(dt);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double h = spec.assets[i].jump_size;
                const double s0_vol = sigma0(spec, i, t0);
                // order matters: the second-order integrands use S1(t-)
                s2_stoch[i] += 2.0 * sigma1(spec, i, t0) * s1[i] * dw[i];
                s1_time_integral[i] += s1[i] * dt;
                delta += spec.weights[i] * s0_vol * dw[i];
                s1[i] += s0_vol * dw[i] - spec.intensity * h * spec.assets[i].spot * dt;
            }
        }
        while (jump_cursor < jump_times.size() && jump_times[jump_cursor] <= grid[seg + 1]) {
            for (std::size_t i = 0; i < n; ++i) {
                const double h = spec.assets[i].jump_size;
                s2_jump[i] += 2.0 * h * s1[i];
                s1[i] += h * spec.assets[i].spot;
            }
            ++jump_cursor;
        }
    }

    double value = spec.basket_spot();
    for (std::size_t i = 0; i < n; ++i) {
        const double h = spec.assets[i].jump_size;
        const double s2 =
            -2.0 * spec.intensity * h * s1_time_integral[i] + s2_stoch[i] + s2_jump[i];
        value += spec.weights[i] * (s1[i] + 0.5 * s2);
    }
    return {value, delta / vol_of_delta};
}

}  // namespace

TEST_CASE("regressed conditional mean matches the closed-form quadratic",
          "[expansion_mc][slow]") {
    const auto spec = bt::base_spec(bt::table1_jump(), 0.3);
    const double maturity = 1.0;
    const auto coeffs = expansion_coefficients(spec, maturity);

    std::mt19937_64 rng(90210);
    const int paths = 35000;
    const int steps = 400;

    for (std::int64_t k : {0, 1, 2}) {
        std::vector<double> xs, ys;
        xs.reserve(paths);
        ys.reserve(paths);
        for (int p = 0; p < paths; ++p) {
            const auto sample =
                simulate_expansion_path(spec, maturity, k, coeffs.vol, rng, steps);
            xs.push_back(sample.x);
            ys.push_back(sample.approx_value);
        }
        const auto fit = bt::fit_quadratic(xs, ys);
        const auto quad = lba_quadratic(coeffs, spec, maturity, 100.0, k);

        for (double x : {-1.0, 0.0, 1.0}) {
            // quad prices S^A - K; the regression sees S^A itself
            const double closed_form =
                quad.curvature * x * x + quad.slope * x + quad.intercept + 100.0;
            const double se = fit.prediction_stderr(x);
            INFO("k=" << k << " x=" << x << " fit=" << fit.predict(x)
                      << " closed=" << closed_form << " se=" << se);
            CHECK(std::abs(fit.predict(x) - closed_form) < 3.0 * se + 0.02);
        }
    }
}
