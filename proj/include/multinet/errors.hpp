#pragma once

#include <stdexcept>
#include <string>

namespace multinet {

/// Bad user input: malformed files, dimension mismatches, out-of-range options.
/// CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure at runtime: rank deficiency, residual collapse,
/// non-convergence where convergence is required. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace multinet
