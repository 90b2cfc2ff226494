#pragma once

#include <stdexcept>
#include <string>

namespace coa {

/// Bad argument to a library operation (empty vector, dimension mismatch, ...).
class InvalidInput : public std::invalid_argument {
  public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Inconsistent or out-of-range run configuration.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// An engine invariant did not hold; indicates a bug rather than bad input.
class InvariantViolation : public std::logic_error {
  public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

/// File missing, unreadable, or not in the expected format.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace coa
