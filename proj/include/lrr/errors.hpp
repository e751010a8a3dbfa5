#pragma once

#include <stdexcept>
#include <string>

namespace lrr {

/// Operand dimensions do not conform (bad input data or caller bug).
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// A documented precondition of an operation was violated.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// A numeric routine failed to converge or produced non-finite values.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lrr
