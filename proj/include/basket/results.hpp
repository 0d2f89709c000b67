#pragma once

#include <optional>
#include <string>
#include <vector>

#include "basket/errors.hpp"

namespace basket {

enum class Method { Lba, LbExact, UpperBound, Pea, FirstOrderCv, Mc, Aea };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Lba: return "lba";
        case Method::LbExact: return "lb";
        case Method::UpperBound: return "ub";
        case Method::Pea: return "pea";
        case Method::FirstOrderCv: return "cv";
        case Method::Mc: return "mc";
        case Method::Aea: return "aea";
    }
    return "?";
}

inline std::optional<Method> method_from_name(const std::string& name) {
    if (name == "lba") return Method::Lba;
    if (name == "lb") return Method::LbExact;
    if (name == "ub") return Method::UpperBound;
    if (name == "pea") return Method::Pea;
    if (name == "cv") return Method::FirstOrderCv;
    if (name == "mc") return Method::Mc;
    if (name == "aea") return Method::Aea;
    return std::nullopt;
}

struct PricingResult {
    double price = 0.0;
    std::optional<double> std_error;  // Monte Carlo only
    Method method = Method::Lba;
    std::optional<double> implied_vol;
    std::vector<std::string> warnings;
};

}  // namespace basket
