#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "basket/lba.hpp"
#include "basket/math.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace basket;
namespace bt = basket::testing;

TEST_CASE("positive-part quadratic expectation, pinned cases", "[lba]") {
    CHECK(positive_part_quadratic_expectation(0.0, 0.0, 5.0) == 5.0);
    CHECK(positive_part_quadratic_expectation(0.0, 0.0, -2.0) == 0.0);
    CHECK(positive_part_quadratic_expectation(1.0, 0.0, 0.0) == Approx(1.0).epsilon(1e-12));
    CHECK(positive_part_quadratic_expectation(0.0, 1.0, 0.0) ==
          Approx(norm_pdf(0.0)).epsilon(1e-12));
    CHECK(positive_part_quadratic_expectation(1.0, 0.0, -1.0) ==
          Approx(2.0 * norm_pdf(1.0)).epsilon(1e-12));
    CHECK(positive_part_quadratic_expectation(1.0, 0.0, -1.0) == Approx(0.483941).margin(1e-6));
    // strictly negative parabola
    CHECK(positive_part_quadratic_expectation(-1.0, 0.0, -0.5) == 0.0);
    // downward parabola with positive window
    const double oracle = bt::positive_part_quadratic_oracle(-1.0, 0.5, 2.0);
    CHECK(positive_part_quadratic_expectation(-1.0, 0.5, 2.0) ==
          Approx(oracle).margin(1e-10));
}

TEST_CASE("closed form vs quadrature oracle on random coefficients", "[lba]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double c = uni(rng), a1 = uni(rng), a0 = uni(rng);
        const double engine = positive_part_quadratic_expectation(c, a1, a0);
        const double oracle = bt::positive_part_quadratic_oracle(c, a1, a0);
        worst = std::max(worst, std::abs(engine - oracle));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("linear-branch tolerance avoids the unstable root formula", "[lba]") {
    // c tiny relative to the other coefficients: linear treatment
    const double engine = positive_part_quadratic_expectation(1e-18, 1.0, 0.5);
    const double linear = positive_part_quadratic_expectation(0.0, 1.0, 0.5);
    CHECK(engine == Approx(linear).epsilon(1e-12));
}

TEST_CASE("poisson pmf spec values", "[lba]") {
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.3, 0) == Approx(0.740818).margin(1e-6));
}

TEST_CASE("truncation policies", "[lba]") {
    CHECK(PoissonTruncation::paper_compat().resolve_kmax(0.3) == 9);
    const auto kmax = PoissonTruncation::adaptive().resolve_kmax(8.0);
    CHECK(kmax > 9);
    double tail = 1.0;
    for (std::int64_t k = 0; k <= kmax; ++k) tail -= poisson_pmf(8.0, k);
    CHECK(tail <= 1e-12);
}

TEST_CASE("jump-free price collapses to a single quadratic expectation", "[lba]") {
    const auto spec = bt::base_spec();  // h = 0, lambda = 0.3
    const auto result = price_lba(spec, 1.0, 100.0);
    const double expected = bt::positive_part_quadratic_oracle(0.95, std::sqrt(190.0), -0.95);
    CHECK(result.price == Approx(expected).margin(1e-9));
}

TEST_CASE("published values for the four table configurations", "[lba]") {
    // lognormal sigma=0.2, common jump e^{-1/4}-1
    const auto t1 = bt::base_spec(bt::table1_jump(), 0.3);
    CHECK(price_lba(t1, 1.0, 100.0, {PoissonTruncation::paper_compat(), {}, false}).price ==
          Approx(7.37).margin(0.005));

    // CEV alpha=0.2 beta=0.8
    const auto t3 = bt::four_asset_spec(LocalVolatility::cev(0.2, 0.8),
                                        std::vector<double>(4, bt::table1_jump()), 0.3);
    CHECK(price_lba(t3, 1.0, 100.0, {PoissonTruncation::paper_compat(), {}, false}).price ==
          Approx(5.31).margin(0.005));

    // heterogeneous jumps, CEV alpha=0.2 beta=0.5
    const auto t4 = bt::four_asset_spec(LocalVolatility::cev(0.2, 0.5),
                                        {0.0, 0.3, -0.3, 0.0}, 0.3);
    CHECK(price_lba(t4, 1.0, 100.0, {PoissonTruncation::paper_compat(), {}, false}).price ==
          Approx(0.63).margin(0.005));
}

TEST_CASE("price is non-increasing and convex in the strike", "[lba]") {
    const auto spec = bt::base_spec(bt::table1_jump(), 0.3);
    std::vector<double> prices;
    for (int strike = 50; strike <= 150; strike += 10)
        prices.push_back(price_lba(spec, 1.0, strike).price);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i)
        CHECK(prices[i + 1] <= prices[i] + 1e-12);
    for (std::size_t i = 0; i + 2 < prices.size(); ++i)
        CHECK(prices[i] - 2.0 * prices[i + 1] + prices[i + 2] >= -1e-9);
}

TEST_CASE("jensen floor on every jump-count slice", "[lba]") {
    const auto spec = bt::base_spec(bt::table1_jump(), 0.3);
    const auto coeffs = expansion_coefficients(spec, 1.0);
    const double mean = 0.3;
    double floor_value = 0.0;
    for (std::int64_t k = 0; k <= 9; ++k) {
        const auto q = lba_quadratic(coeffs, spec, 1.0, 100.0, k);
        floor_value += poisson_pmf(mean, k) * std::max(0.0, q.curvature + q.intercept);
    }
    const double lba = price_lba(spec, 1.0, 100.0).price;
    CHECK(lba >= floor_value - 1e-12);
}

TEST_CASE("truncation modes agree at small jump rates and warn at large ones", "[lba]") {
    // lambda T <= 1.2 across these
    for (double lambda : {0.3, 1.0}) {
        const auto spec = bt::base_spec(bt::table1_jump(), lambda);
        const double compat =
            price_lba(spec, 1.0, 100.0, {PoissonTruncation::paper_compat(), {}, false}).price;
        const double adaptive = price_lba(spec, 1.0, 100.0).price;
        CHECK(std::abs(compat - adaptive) < 1e-6);
    }

    // the high-intensity sweep (lambda T = 8) needs the adaptive series
    const auto extreme = bt::four_asset_spec(LocalVolatility::black_scholes(0.5),
                                             {0.0, 0.1, 0.3, -0.5}, 4.0, 0.9);
    const auto compat =
        price_lba(extreme, 2.0, 100.0, {PoissonTruncation::paper_compat(), {}, false});
    CHECK_FALSE(compat.warnings.empty());
    const auto adaptive = price_lba(extreme, 2.0, 100.0);
    CHECK(adaptive.warnings.empty());
    CHECK(adaptive.price > compat.price + 1.0);  // the dropped tail is material here
}

TEST_CASE("degenerate volatility propagates as a model error", "[lba]") {
    const auto spec = bt::four_asset_spec(LocalVolatility::black_scholes(0.0),
                                          std::vector<double>(4, 0.1), 0.3);
    CHECK_THROWS_AS(price_lba(spec, 1.0, 100.0), ModelError);
}
