#pragma once

#include <cmath>
#include <vector>

#include "basket/market_model.hpp"

namespace basket::testing {

// The shared experiment setup: n=4, w=0.25, S_i(0)=100, rho=0.3 off-diagonal.
inline BasketSpec four_asset_spec(const LocalVolatility& vol, const std::vector<double>& jumps,
                                  double intensity, double rho = 0.3) {
    std::vector<JumpDiffusionAsset> assets;
    for (int i = 0; i < 4; ++i) assets.push_back({100.0, jumps[static_cast<std::size_t>(i)], vol});
    return BasketSpec(std::move(assets), {0.25, 0.25, 0.25, 0.25},
                      SquareMatrix::equicorrelation(4, rho), intensity);
}

// Lognormal sigma = 0.2, no jumps, lambda = 0.3.
inline BasketSpec base_spec(double jump = 0.0, double intensity = 0.3, double sigma = 0.2) {
    return four_asset_spec(LocalVolatility::black_scholes(sigma),
                           std::vector<double>(4, jump), intensity);
}

// Jump size of the first published table: h = e^{-1/4} - 1.
inline double table1_jump() { return std::exp(-0.25) - 1.0; }

inline BasketSpec single_asset_spec(const LocalVolatility& vol, double jump, double intensity) {
    return BasketSpec({{100.0, jump, vol}}, {1.0}, SquareMatrix::identity(1), intensity);
}

}  // namespace basket::testing
