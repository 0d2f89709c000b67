#pragma once

#include <stdexcept>
#include <string>

namespace basket {

// Input or model-usage problem: the request cannot be priced as posed
// (unsupported volatility type for a closed-form method, index out of
// range, degenerate total variance, ...).
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to meet its tolerance (quadrature did not
// converge, Cholesky failed, PIDE layer blew up).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace basket
