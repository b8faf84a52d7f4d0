#pragma once

#include <stdexcept>
#include <string>

namespace nlrt {

/// Invalid model or experiment parameters, detected before any sampling.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (short history, n < 1, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A numerical routine could not reach its requested accuracy.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace nlrt
