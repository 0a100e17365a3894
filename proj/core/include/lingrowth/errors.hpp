#pragma once

#include <stdexcept>
#include <string>

namespace lingrowth {

/// Argument outside the domain of a mathematical map (e.g. y >= 1 for the inverse of g').
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature gave up before reaching its tolerance.
class AccuracyError : public std::runtime_error {
public:
  AccuracyError(const std::string& what, double achieved_bound)
      : std::runtime_error(what), achieved_bound_(achieved_bound) {}

  double achieved_bound() const noexcept { return achieved_bound_; }

private:
  double achieved_bound_;
};

/// Malformed configuration or inconsistent inputs.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The limit of g' at infinity could not be pinned down numerically.
class UndeterminedLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace lingrowth
