#pragma once

#include <stdexcept>
#include <string>

namespace arblab {

// Invalid input: bad configuration, shape mismatch, violated precondition.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical contract broken at runtime: a guard tripped, a residual exceeded
// its tolerance, a price went non-positive. The CLI maps this to exit code 3.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace arblab
