#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace das {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Scenario or model parameters failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A covariance block could not be factorized, or a variance is too small to
// divide by. index() is the global node index responsible.
class NumericalDegeneracy : public Error {
 public:
  NumericalDegeneracy(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace das
