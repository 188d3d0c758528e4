#pragma once

#include <stdexcept>
#include <string>

namespace dsieve {

// Malformed input: bad modulus, missing instance field, |X| < 2, ...
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query beyond the domain of a precomputed table.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Memory budget or enumeration cap exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is well-formed but violates a mathematical precondition
// (e.g. support of f not contained in the primes of the window).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure cannot certify the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double required_step)
      : std::runtime_error(what), required_step_(required_step) {}

  double required_step() const noexcept { return required_step_; }

 private:
  double required_step_;
};

}  // namespace dsieve
