#pragma once

#include <stdexcept>
#include <string>

namespace cforge {

// Violated precondition on a numerical value (out-of-range P_S, invalid
// population, unreachable target). The CLI maps this to exit code 2.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Operands whose dimensions do not fit together.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// File could not be read or written. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace cforge
