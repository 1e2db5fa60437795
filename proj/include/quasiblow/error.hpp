#pragma once

#include <stdexcept>
#include <string>

namespace quasiblow {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wave speed evaluated outside the interval where c(u) > 0.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double u) : Error(what), u_(u) {}
  double u() const { return u_; }

 private:
  double u_;
};

// A configuration or argument violates a stated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The data or model violate a hypothesis of the blow-up theorem
// (phi'(0) < 0, c'(0) > 0, lambda in (0, 1]).
class HypothesisError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A query refers to a point outside the stored data (grid, time range, curve).
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// A blow-up diagnostic was requested for a run that never blew up.
class NoBlowupError : public Error {
 public:
  using Error::Error;
};

// Too few resolved scales or samples for a fit.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace quasiblow
