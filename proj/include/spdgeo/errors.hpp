#pragma once

#include <stdexcept>
#include <string>

namespace spdgeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, asymmetric input, bad parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix function was applied outside its domain (e.g. log of a
/// non-positive-definite matrix).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A retraction step overflowed the exponential.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class NonFiniteCost : public Error {
 public:
  using Error::Error;
};

/// The line search was handed a direction with non-negative slope.
class NotDescent : public Error {
 public:
  using Error::Error;
};

/// Data do not span the ambient space.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A class-specific update met a dgf outside its class (e.g. h < 0 in CCCP).
class ClassViolation : public Error {
 public:
  using Error::Error;
};

class IncompatibleMethod : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Termination status shared by the manifold and fixed-point solvers.
enum class Status { Converged, MaxIter, LineSearchFail, NonFinite };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Converged:
      return "converged";
    case Status::MaxIter:
      return "max_iter";
    case Status::LineSearchFail:
      return "line_search_fail";
    case Status::NonFinite:
      return "non_finite";
  }
  return "unknown";
}

}  // namespace spdgeo
