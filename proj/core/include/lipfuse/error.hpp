#pragma once

#include <stdexcept>
#include <string>

namespace lipfuse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates an operation's precondition
/// (k out of range, T < 2, threshold ordering, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed or inconsistent (bad manifest, bad tensor file,
/// dimension mismatch, unknown label, unreadable/unwritable file).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-finite values produced, solver did not
/// converge where convergence was required).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lipfuse
