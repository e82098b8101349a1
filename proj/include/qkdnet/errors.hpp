#pragma once

#include <stdexcept>
#include <string>

namespace qkdnet {

/// Thrown when an estimator is asked for a result it cannot form
/// (fewer samples than the statistic needs).
class InsufficientDataError : public std::runtime_error {
public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by the network layer when a requested end-to-end key has no
/// prerequisite session material.
class UnavailableRouteError : public std::runtime_error {
public:
  explicit UnavailableRouteError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller broke a documented precondition (e.g. handed unsorted streams
/// to the coincidence matcher).
class ContractViolation : public std::logic_error {
public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Configuration text that does not parse or violates a parameter invariant.
/// Carries the 1-based line number when known (0 otherwise).
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

}  // namespace qkdnet
