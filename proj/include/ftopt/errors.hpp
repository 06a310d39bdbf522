#pragma once

#include <stdexcept>
#include <string>

namespace ftopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent vector/matrix sizes in problem data or arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Problem data that violates convexity (e.g. an indefinite Q).
class NonconvexError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (negative x, bad exponent, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for the given problem family.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem file. The message carries line/field context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A linear solve inside a flow field hit a singular or numerically
/// degenerate matrix (boundary point, singular Hessian).
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

}  // namespace ftopt
