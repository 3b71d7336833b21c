#pragma once

#include <stdexcept>
#include <string>

namespace codethresh {

/// Malformed or inconsistent input (bad parameter combination, non-normalized
/// vector, non-distinct columns). The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function. Exit code 2.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A computation would exceed a configured work or memory budget. Exit code 1.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace codethresh
