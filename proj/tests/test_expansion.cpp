#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "basket/expansion.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace basket;
namespace bt = basket::testing;

TEST_CASE("profile integrals, closed forms for the base config", "[expansion]") {
    const auto spec = bt::base_spec();

    const auto one_year = profile_integrals(spec, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(one_year.i0[i] == Approx(190.0).epsilon(1e-13));
        CHECK(one_year.i1[i] == Approx(95.0).epsilon(1e-13));
        CHECK(one_year.i2[i] == Approx(0.95).epsilon(1e-13));
        CHECK(one_year.i3[i] == Approx(180.5).epsilon(1e-13));
    }

    const auto three_years = profile_integrals(spec, 3.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(three_years.i0[i] == Approx(570.0).epsilon(1e-13));
        CHECK(three_years.i1[i] == Approx(855.0).epsilon(1e-13));
        CHECK(three_years.i2[i] == Approx(8.55).epsilon(1e-13));
        CHECK(three_years.i3[i] == Approx(1624.5).epsilon(1e-13));
    }
}

TEST_CASE("zero volatility gives zero integrals and a degeneracy error", "[expansion]") {
    const auto spec = bt::four_asset_spec(LocalVolatility::black_scholes(0.0),
                                          std::vector<double>(4, 0.0), 0.3);
    const auto ints = profile_integrals(spec, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ints.i0[i] == 0.0);
        CHECK(ints.i3[i] == 0.0);
    }
    CHECK_THROWS_AS(expansion_coefficients(spec, 1.0), ModelError);
}

TEST_CASE("expansion coefficients of the base config", "[expansion]") {
    const auto spec = bt::base_spec();

    const auto one_year = expansion_coefficients(spec, 1.0);
    CHECK(one_year.variance == Approx(190.0).epsilon(1e-13));
    CHECK(one_year.vol == Approx(13.78404875).margin(1e-7));
    CHECK(one_year.curvature == Approx(0.95).epsilon(1e-13));

    const auto three_years = expansion_coefficients(spec, 3.0);
    CHECK(three_years.variance == Approx(570.0).epsilon(1e-13));
    CHECK(three_years.curvature == Approx(2.85).epsilon(1e-13));
}

TEST_CASE("single lognormal asset collapses to the textbook values", "[expansion]") {
    const double sigma_hat = 0.25, spot = 100.0, maturity = 2.0;
    const auto spec = bt::single_asset_spec(LocalVolatility::black_scholes(sigma_hat), 0.0, 0.0);
    const auto coeffs = expansion_coefficients(spec, maturity);
    CHECK(coeffs.vol == Approx(sigma_hat * spot * std::sqrt(maturity)).epsilon(1e-12));
    CHECK(coeffs.curvature ==
          Approx(sigma_hat * sigma_hat * spot * maturity / 2.0).epsilon(1e-12));
}

TEST_CASE("quadrature path agrees with the analytic path", "[expansion]") {
    for (double maturity : {1.0, 3.0}) {
        for (const auto& vol :
             {LocalVolatility::black_scholes(0.2), LocalVolatility::cev(0.5, 0.8),
              LocalVolatility::cev(0.2, 0.5)}) {
            const auto spec =
                bt::four_asset_spec(vol, std::vector<double>(4, bt::table1_jump()), 0.3);
            QuadratureConfig forced;
            forced.force_quadrature = true;
            const auto analytic = profile_integrals(spec, maturity);
            const auto numeric = profile_integrals(spec, maturity, forced);
            for (std::size_t i = 0; i < 4; ++i) {
                CHECK(numeric.i0[i] == Approx(analytic.i0[i]).epsilon(1e-10));
                CHECK(numeric.i1[i] == Approx(analytic.i1[i]).epsilon(1e-10));
                CHECK(numeric.i2[i] == Approx(analytic.i2[i]).epsilon(1e-10));
                CHECK(numeric.i3[i] == Approx(analytic.i3[i]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("time-dependent volatility integrals match hand integration", "[expansion]") {
    // sigma(t,S) = (0.2 + 0.2 t) S on [0,1]: every integral is polynomial.
    const auto vol = LocalVolatility::term_structure({0.0, 1.0}, {0.2, 0.4});
    const auto spec = bt::four_asset_spec(vol, std::vector<double>(4, 0.0), 0.0);
    const auto ints = profile_integrals(spec, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ints.i0[i] == Approx(190.0 * 7.0 / 3.0).epsilon(1e-10));
        CHECK(ints.i1[i] == Approx(190.0 * 11.0 / 12.0).epsilon(1e-10));
        CHECK(ints.i2[i] == Approx(1.9 * 17.0 / 12.0).epsilon(1e-10));
        CHECK(ints.i3[i] == Approx(17689.0 / 18.0).epsilon(1e-9));
    }
}

TEST_CASE("nonnegative profile integrals for entrywise-nonnegative correlation",
          "[expansion]") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto spec = bt::four_asset_spec(
            LocalVolatility::cev(0.1 + 0.4 * uni(rng), 0.5 + 0.5 * uni(rng)),
            std::vector<double>(4, uni(rng) - 0.5), 0.5 * uni(rng), 0.3 * uni(rng));
        const auto ints = profile_integrals(spec, 0.5 + 2.0 * uni(rng));
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(ints.i0[i] >= 0.0);
            CHECK(ints.i1[i] >= 0.0);
        }
    }
}

TEST_CASE("conditional quadratic without jumps", "[expansion]") {
    const auto spec = bt::base_spec();
    const auto coeffs = expansion_coefficients(spec, 1.0);
    for (std::int64_t k : {0, 1, 5}) {
        const auto q = lba_quadratic(coeffs, spec, 1.0, 100.0, k);
        CHECK(q.curvature == Approx(0.95).epsilon(1e-13));
        CHECK(q.slope == Approx(13.78404875).margin(1e-7));
        CHECK(q.intercept == Approx(-0.95).epsilon(1e-12));
    }
}

TEST_CASE("conditional quadratic for the first published configuration", "[expansion]") {
    const auto spec = bt::base_spec(bt::table1_jump(), 0.3);
    const auto coeffs = expansion_coefficients(spec, 1.0);
    const auto q = lba_quadratic(coeffs, spec, 1.0, 100.0, 0);

    // independent evaluation of the two displays
    const double h = bt::table1_jump();
    const double v = std::sqrt(190.0);
    const double slope_expected = v + (0.0 - 0.3) * (h * (95.0 + 100.0 * 0.95)) / v;
    const double intercept_expected = 100.0 + (0.0 - 0.3) * (100.0 * h) +
                                      0.5 * 100.0 * h * h * (0.09 - 0.0) - 0.95 - 100.0;
    CHECK(q.slope == Approx(slope_expected).epsilon(1e-12));
    CHECK(q.intercept == Approx(intercept_expected).epsilon(1e-12));

    // spec-sheet approximations of the same numbers
    CHECK(q.slope == Approx(14.69887).margin(1.5e-4));
    CHECK(q.intercept == Approx(5.9064).margin(1e-3));
}

TEST_CASE("slope reduces to v without jump sensitivity", "[expansion]") {
    const auto spec = bt::base_spec(0.0, 0.0);  // lambda = 0, h = 0
    const auto coeffs = expansion_coefficients(spec, 1.0);
    for (std::int64_t k : {0, 3, 7})
        CHECK(lba_quadratic(coeffs, spec, 1.0, 100.0, k).slope == Approx(coeffs.vol));
}

TEST_CASE("intercept reconstruction from the conditional-expectation pieces", "[expansion]") {
    // a0(k) must equal: S(0) + first-order constant + (A1+A3+C1+C3) + B2's
    // constant - K, assembled here term by term.
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> jumps;
        for (int i = 0; i < 4; ++i) jumps.push_back(uni(rng) * 1.5 - 0.75);
        const double lambda = 2.0 * uni(rng);
        const double maturity = 0.25 + 2.75 * uni(rng);
        const double strike = 60.0 + 80.0 * uni(rng);
        const std::int64_t k = static_cast<std::int64_t>(uni(rng) * 6.0);
        const auto spec =
            bt::four_asset_spec(LocalVolatility::cev(0.1 + 0.4 * uni(rng), 0.5 + 0.5 * uni(rng)),
                                jumps, lambda);

        const auto coeffs = expansion_coefficients(spec, maturity);
        const auto q = lba_quadratic(coeffs, spec, maturity, strike, k);

        const double kd = static_cast<double>(k);
        const double lt = lambda * maturity;
        double first_order = 0.0, a1_piece = 0.0, a3_piece = 0.0, c1_piece = 0.0,
               c3_piece = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const double w = spec.weights[i];
            const double h = spec.assets[i].jump_size;
            const double s0 = spec.assets[i].spot;
            first_order += w * h * s0 * (kd - lt);
            a1_piece += w * 0.5 * s0 * lambda * lambda * h * h * maturity * maturity;
            a3_piece += w * (-lambda * s0 * h * h) * (kd * maturity / 2.0);
            c1_piece += w * (-0.5 * s0 * lambda * h * h * maturity * kd);
            c3_piece += w * h * h * s0 * (kd * kd - kd) / 2.0;
        }
        const double rebuilt = spec.basket_spot() + first_order + a1_piece + a3_piece +
                               c1_piece + c3_piece - coeffs.curvature - strike;
        CHECK(q.intercept == Approx(rebuilt).margin(1e-10));
    }
}

TEST_CASE("gaussian mean of the quadratic is curvature plus intercept", "[expansion]") {
    const auto spec = bt::base_spec(bt::table1_jump(), 0.3);
    const auto coeffs = expansion_coefficients(spec, 1.0);
    for (std::int64_t k : {0, 1, 4}) {
        const auto q = lba_quadratic(coeffs, spec, 1.0, 100.0, k);
        const double mean = bt::gauss_hermite_expectation(
            [&](double x) { return q.curvature * x * x + q.slope * x + q.intercept; });
        CHECK(mean == Approx(q.curvature + q.intercept).margin(1e-10));
    }
}

TEST_CASE("literal intercept flag reproduces the printed display", "[expansion]") {
    const auto spec = bt::base_spec(bt::table1_jump(), 0.3);
    const auto coeffs = expansion_coefficients(spec, 1.0);
    const auto corrected = lba_quadratic(coeffs, spec, 1.0, 100.0, 2, false);
    const auto literal = lba_quadratic(coeffs, spec, 1.0, 100.0, 2, true);
    // the two differ by (K - k) * sum w_i h_i S_i(0)
    const double shift = (100.0 - 2.0) * (100.0 * bt::table1_jump());
    CHECK(literal.intercept - corrected.intercept == Approx(shift).epsilon(1e-10));
    CHECK(literal.slope == corrected.slope);
}
