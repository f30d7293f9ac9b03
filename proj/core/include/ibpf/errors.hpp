#pragma once
#include <stdexcept>
#include <string>

namespace ibpf {

// Domain errors use std::domain_error directly.

// A numerical procedure gave up; carries whatever it had reached.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double partial = 0.0, double err = 0.0)
      : std::runtime_error(what), partial_(partial), err_(err) {}
  double partial_value() const noexcept { return partial_; }
  double error_estimate() const noexcept { return err_; }

 private:
  double partial_;
  double err_;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ibpf
