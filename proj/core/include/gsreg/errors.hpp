#pragma once

#include <stdexcept>
#include <string>

namespace gsreg {

/// Dimension mismatch between inputs (vector lengths, matrix shapes).
class ShapeError : public std::invalid_argument {
public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// A covariance matrix failed the symmetric-positive-definite check.
class NotSpdError : public std::runtime_error {
public:
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter lies outside its legal range (e.g. correlation alpha at the
/// interval boundary, nonpositive variance).
class ParameterRangeError : public std::invalid_argument {
public:
  explicit ParameterRangeError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// An enumeration or quadrature budget was exceeded.
class BudgetError : public std::runtime_error {
public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gsreg
