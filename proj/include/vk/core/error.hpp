#pragma once

#include <stdexcept>
#include <string>

namespace vk {

/// Malformed or out-of-domain input (reducible polynomial, zero ideal, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested numerical accuracy could not be reached within the term budget.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved_bound)
      : std::runtime_error(what + " (achieved bound " + std::to_string(achieved_bound) + ")"),
        achieved_bound_(achieved_bound) {}
  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

/// Configured time, memory or search budget was exhausted.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant (d*d != 0, inconsistent orientation data, ...).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Missing or inconsistent configuration (catalog entries, caches).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vk
