#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "basket/closed_form.hpp"
#include "basket/config.hpp"
#include "basket/lba.hpp"
#include "basket/mc.hpp"
#include "basket/pide.hpp"
#include "basket/results.hpp"

namespace basket {

struct PriceRun {
    std::string config_id;
    double maturity = 0.0;
    double strike = 0.0;
    std::vector<PricingResult> results;
    std::vector<std::string> errors;  // "method: message" for methods that failed
};

inline PricingResult price_with_method(const BasketSpec& spec, Method method, double maturity,
                                       double strike, const ExperimentConfig& cfg) {
    switch (method) {
        case Method::Lba: {
            LbaOptions opts;
            opts.truncation = cfg.lba.truncation == "paper_compat"
                                  ? PoissonTruncation::paper_compat()
                                  : PoissonTruncation::adaptive();
            opts.paper_literal_a0 = cfg.lba.paper_literal_a0;
            return price_lba(spec, maturity, strike, opts);
        }
        case Method::LbExact: return price_lb_exact(spec, maturity, strike);
        case Method::UpperBound: return price_upper_bound(spec, maturity, strike);
        case Method::Pea: return price_pea(spec, maturity, strike);
        case Method::FirstOrderCv: return price_first_order_cv(spec, maturity, strike);
        case Method::Mc: return to_pricing_result(price_mc(spec, maturity, strike, cfg.mc));
        case Method::Aea: return to_pricing_result(solve_pide(spec, maturity, strike, cfg.pide));
    }
    throw ModelError("unknown method");
}

inline void attach_implied_vol(PricingResult& result, double spot, double strike,
                               double maturity) {
    const double intrinsic = std::max(spot - strike, 0.0);
    if (result.price > intrinsic && result.price < spot)
        result.implied_vol = implied_vol(result.price, spot, strike, maturity);
}

// Prices every requested method for every strike of the config. Failures of
// one method are reported in-band; the other methods still run.
inline std::vector<PriceRun> run_price(const ExperimentConfig& cfg) {
    const BasketSpec spec = to_basket_spec(cfg);
    const auto report = validate_basket(spec);
    if (!report.ok) {
        std::string all = "invalid basket:";
        for (const auto& v : report.violations) all += " " + v + ";";
        throw ModelError(all);
    }

    std::vector<double> strikes;
    if (cfg.strike.has_value())
        strikes.push_back(*cfg.strike);
    else
        for (const double m : cfg.moneyness) strikes.push_back(m * spec.basket_spot());

    std::vector<PriceRun> runs;
    for (const double strike : strikes) {
        PriceRun run;
        run.config_id = cfg.name.empty() ? "config" : cfg.name;
        if (strikes.size() > 1) run.config_id += "/K=" + std::to_string(strike);
        run.maturity = cfg.maturity;
        run.strike = strike;
        for (const Method method : cfg.methods) {
            try {
                PricingResult result = price_with_method(spec, method, cfg.maturity, strike, cfg);
                attach_implied_vol(result, spec.basket_spot(), strike, cfg.maturity);
                run.results.push_back(std::move(result));
            } catch (const std::exception& e) {
                run.errors.push_back(method_name(method) + ": " + e.what());
            }
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

}  // namespace basket
