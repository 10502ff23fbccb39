#pragma once

#include <stdexcept>
#include <string>

namespace genpoly {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or coordinate outside the declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An object violating its invariants (unnormalized measure, bad table, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An enumeration that would exceed a configured cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An operation that is not defined for the given input kind.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (function, predicate, chain or config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace genpoly
