#pragma once

#include <stdexcept>
#include <string>

namespace aea {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The chain produced a non-finite state (or overflowed the price map).
class ModelBlowUp : public Error {
 public:
  ModelBlowUp(const std::string& what, double state)
      : Error(what), state_(state) {}
  double state() const noexcept { return state_; }

 private:
  double state_;
};

/// A tabulated density was queried outside of its grid.
class OutOfSupport : public Error {
 public:
  OutOfSupport(const std::string& what, double point)
      : Error(what), point_(point) {}
  double point() const noexcept { return point_; }

 private:
  double point_;
};

/// A long run left any plausible stationary region (|X| above the guard).
class NonErgodic : public Error {
 public:
  using Error::Error;
};

/// An exponential moment that should be finite is not.
class IntegrabilityFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace aea
