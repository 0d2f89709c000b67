#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "basket/closed_form.hpp"
#include "basket/market_model.hpp"
#include "basket/math.hpp"
#include "basket/results.hpp"

namespace basket {

struct McConfig {
    std::int64_t n_paths = 100000;
    int steps_per_year = 200;
    std::uint64_t seed = 42;
    bool control_variate = true;
    bool antithetic = false;
    int threads = 0;  // 0 = hardware concurrency
};

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    double cv_beta = 0.0;
};

namespace detail {

inline constexpr std::int64_t kMcBlockSize = 4096;

// Substream RNG: each 4096-path block draws from its own generator seeded by
// (seed, block index), so results do not depend on how blocks are assigned
// to threads.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t block) {
        std::seed_seq seq{seed, block};
        engine_.seed(seq);
    }

    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }
    double normal() { return norm_inv(uniform()); }

    std::int64_t poisson(double mean) {
        const double u = uniform();
        if (mean <= 0.0) return 0;
        double p = std::exp(-mean);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf && k < 100000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

private:
    std::mt19937_64 engine_;
};

struct PathOutcome {
    double terminal = 0.0;    // S(T)
    double linearized = 0.0;  // S(0) + S^(1)(T) from the same noise
};

// One Euler path on the jump-adapted grid. Jump times are exact (constant
// intensity); between jumps the diffusion is stepped with the compensator
// drift -h_i S_i lambda dt. The first-order expansion value is accumulated
// from the same Brownian increments for the control variate.
class PathSimulator {
public:
    PathSimulator(const BasketSpec& spec, double maturity, int steps_per_year)
        : spec_(spec),
          maturity_(maturity),
          n_(spec.size()),
          chol_(cholesky_lower(spec.correlation)),
          base_grid_(build_base_grid(maturity, steps_per_year)) {
        jump_drift_ = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            jump_drift_ += spec.weights[i] * spec.assets[i].jump_size * spec.assets[i].spot;
    }

    // normals, when non-null, records every standard normal drawn; when
    // `replay` is set the recorded values are consumed negated instead of
    // drawing (antithetic leg).
    PathOutcome simulate(PathRng& rng, std::vector<double>* normals = nullptr,
                         bool replay = false) const {
        const std::int64_t jumps = replay ? cached_jumps_ : rng.poisson(spec_.intensity * maturity_);
        if (!replay) {
            cached_jumps_ = jumps;
            cached_jump_times_.resize(static_cast<std::size_t>(jumps));
            for (auto& t : cached_jump_times_) t = rng.uniform() * maturity_;
            std::sort(cached_jump_times_.begin(), cached_jump_times_.end());
        }

        grid_.assign(base_grid_.begin(), base_grid_.end());
        grid_.insert(grid_.end(), cached_jump_times_.begin(), cached_jump_times_.end());
        std::sort(grid_.begin(), grid_.end());

        state_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) state_[i] = spec_.assets[i].spot;
        double lin_diffusion = 0.0;

        std::size_t jump_cursor = 0;
        std::size_t replay_cursor = 0;
        z_.resize(n_);
        dw_.resize(n_);
        for (std::size_t seg = 0; seg + 1 < grid_.size(); ++seg) {
            const double t0 = grid_[seg];
            const double t1 = grid_[seg + 1];
            const double dt = t1 - t0;
            if (dt > 1e-15) {
                const double sqrt_dt = std::sqrt(dt);
                for (std::size_t i = 0; i < n_; ++i) {
                    double z;
                    if (replay) {
                        z = -(*normals)[replay_cursor++];
                    } else {
                        z = rng.normal();
                        if (normals) normals->push_back(z);
                    }
                    z_[i] = z;
                }
                for (std::size_t i = 0; i < n_; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j <= i; ++j) acc += chol_(i, j) * z_[j];
                    dw_[i] = acc * sqrt_dt;
                }
                for (std::size_t i = 0; i < n_; ++i) {
                    const auto& asset = spec_.assets[i];
                    const double sig = asset.vol.value(t0, state_[i]);
                    state_[i] += sig * dw_[i] -
                                 asset.jump_size * state_[i] * spec_.intensity * dt;
                    if (state_[i] < 0.0) state_[i] = 0.0;
                    lin_diffusion +=
                        spec_.weights[i] * asset.vol.value(t0, asset.spot) * dw_[i];
                }
            }
            while (jump_cursor < cached_jump_times_.size() &&
                   cached_jump_times_[jump_cursor] <= t1) {
                for (std::size_t i = 0; i < n_; ++i) {
                    state_[i] *= 1.0 + spec_.assets[i].jump_size;
                    if (state_[i] < 0.0) state_[i] = 0.0;
                }
                ++jump_cursor;
            }
        }

        PathOutcome out;
        for (std::size_t i = 0; i < n_; ++i) out.terminal += spec_.weights[i] * state_[i];
        out.linearized =
            spec_.basket_spot() +
            (static_cast<double>(jumps) - spec_.intensity * maturity_) * jump_drift_ +
            lin_diffusion;
        return out;
    }

private:
    static std::vector<double> build_base_grid(double maturity, int steps_per_year) {
        const int steps = std::max(1, static_cast<int>(std::ceil(steps_per_year * maturity)));
        std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
        for (int m = 0; m <= steps; ++m) grid[static_cast<std::size_t>(m)] = maturity * m / steps;
        return grid;
    }

    const BasketSpec& spec_;
    double maturity_;
    std::size_t n_;
    SquareMatrix chol_;
    std::vector<double> base_grid_;
    double jump_drift_ = 0.0;

    // scratch, reused across paths of one block
    mutable std::vector<double> grid_, state_, z_, dw_;
    mutable std::vector<double> cached_jump_times_;
    mutable std::int64_t cached_jumps_ = 0;
};

struct BlockSums {
    double y = 0.0, x = 0.0, yy = 0.0, xx = 0.0, xy = 0.0;
    std::int64_t n = 0;

    void add(double yv, double xv) {
        y += yv;
        x += xv;
        yy += yv * yv;
        xx += xv * xv;
        xy += yv * xv;
        ++n;
    }
};

template <typename PerPath>
void run_blocks(const BasketSpec& spec, double maturity, const McConfig& cfg,
                std::vector<BlockSums>& sums, const PerPath& per_path) {
    const std::int64_t blocks = (cfg.n_paths + kMcBlockSize - 1) / kMcBlockSize;
    sums.assign(static_cast<std::size_t>(blocks), BlockSums{});

    const auto worker = [&](std::int64_t block) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(block));
        PathSimulator sim(spec, maturity, cfg.steps_per_year);
        const std::int64_t lo = block * kMcBlockSize;
        const std::int64_t hi = std::min(lo + kMcBlockSize, cfg.n_paths);
        std::vector<double> normals;
        std::int64_t p = lo;
        while (p < hi) {
            if (cfg.antithetic && p + 1 < hi) {
                normals.clear();
                const auto first = sim.simulate(rng, &normals, false);
                const auto second = sim.simulate(rng, &normals, true);
                per_path(sums[static_cast<std::size_t>(block)], first, second);
                p += 2;
            } else {
                const auto one = sim.simulate(rng);
                per_path(sums[static_cast<std::size_t>(block)], one, one);
                ++p;
            }
        }
    };

    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(blocks)));
    if (threads == 1) {
        for (std::int64_t b = 0; b < blocks; ++b) worker(b);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::int64_t b = t; b < blocks; b += threads) worker(b);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Terminal samples (S(T), linearized S(T)) — mainly for tests and
// diagnostics; pricing uses the streaming accumulation in price_mc.
inline std::vector<std::pair<double, double>> simulate_terminal_basket(const BasketSpec& spec,
                                                                       double maturity,
                                                                       const McConfig& cfg) {
    std::vector<std::pair<double, double>> samples(static_cast<std::size_t>(cfg.n_paths));
    const std::int64_t blocks =
        (cfg.n_paths + detail::kMcBlockSize - 1) / detail::kMcBlockSize;
    for (std::int64_t block = 0; block < blocks; ++block) {
        detail::PathRng rng(cfg.seed, static_cast<std::uint64_t>(block));
        detail::PathSimulator sim(spec, maturity, cfg.steps_per_year);
        const std::int64_t lo = block * detail::kMcBlockSize;
        const std::int64_t hi = std::min(lo + detail::kMcBlockSize, cfg.n_paths);
        for (std::int64_t p = lo; p < hi; ++p) {
            const auto out = sim.simulate(rng);
            samples[static_cast<std::size_t>(p)] = {out.terminal, out.linearized};
        }
    }
    return samples;
}

// Monte Carlo price of the basket call, optionally with the first-order
// expansion control variate (beta fitted on the same sample). Deterministic
// given the seed, independent of thread count.
inline McEstimate price_mc(const BasketSpec& spec, double maturity, double strike,
                           const McConfig& cfg) {
    if (cfg.n_paths < 2) throw ModelError("Monte Carlo needs at least 2 paths");

    bool cv = cfg.control_variate;
    double cv_mean = 0.0;
    if (cv) {
        try {
            cv_mean = price_first_order_cv(spec, maturity, strike).price;
        } catch (const ModelError&) {
            cv = false;  // degenerate expansion: fall back to plain MC
        }
    }

    std::vector<detail::BlockSums> sums;
    detail::run_blocks(spec, maturity, cfg, sums,
                       [&](detail::BlockSums& acc, const detail::PathOutcome& a,
                           const detail::PathOutcome& b) {
                           // With antithetic pairs the sample unit is the
                           // pair average; otherwise a == b.
                           const double y = 0.5 * (std::max(a.terminal - strike, 0.0) +
                                                   std::max(b.terminal - strike, 0.0));
                           const double x = 0.5 * (std::max(a.linearized - strike, 0.0) +
                                                   std::max(b.linearized - strike, 0.0));
                           acc.add(y, x);
                       });

    detail::BlockSums total;
    for (const auto& s : sums) {  // fixed block order: deterministic result
        total.y += s.y;
        total.x += s.x;
        total.yy += s.yy;
        total.xx += s.xx;
        total.xy += s.xy;
        total.n += s.n;
    }

    const double n = static_cast<double>(total.n);
    const double y_bar = total.y / n;
    const double x_bar = total.x / n;
    const double var_y = std::max(0.0, total.yy / n - y_bar * y_bar);
    const double var_x = std::max(0.0, total.xx / n - x_bar * x_bar);
    const double cov = total.xy / n - y_bar * x_bar;

    McEstimate est;
    est.n_paths = cfg.n_paths;
    if (cv && var_x > 1e-300) {
        est.cv_beta = cov / var_x;
        est.price = y_bar - est.cv_beta * (x_bar - cv_mean);
        const double resid = std::max(0.0, var_y - cov * cov / var_x);
        est.std_error = std::sqrt(resid / n);
    } else {
        est.cv_beta = 0.0;
        est.price = y_bar;
        est.std_error = std::sqrt(var_y / n);
    }
    return est;
}

inline PricingResult to_pricing_result(const McEstimate& est) {
    PricingResult r;
    r.method = Method::Mc;
    r.price = est.price;
    r.std_error = est.std_error;
    return r;
}

}  // namespace basket
