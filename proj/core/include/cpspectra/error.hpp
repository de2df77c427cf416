#ifndef CPSPECTRA_ERROR_HPP
#define CPSPECTRA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cpspectra {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain (shape mismatch, singular
/// input, violated positivity, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// An iterative or factorization routine did not converge.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// A configured enumeration or size budget would be exceeded.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace cpspectra

#endif
