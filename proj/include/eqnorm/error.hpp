#pragma once

#include <stdexcept>
#include <string>

namespace eqnorm {

// Base of all library errors. The CLI maps ValidationError, EmptyWindowError
// and CapacityError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on user-supplied input was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The requested problem is larger than a configured dense cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// No eigenvalue falls inside the requested energy window.
class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

// A numerical self-check failed; indicates a bug rather than bad input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace eqnorm
