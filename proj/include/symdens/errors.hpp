#pragma once

#include <stdexcept>
#include <string>

namespace symdens {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid input (documents, weights, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

// A refinement whose per-vertex sums do not match the source weights.
class RefinementError : public Error {
 public:
  using Error::Error;
};

// Proportional response asked of a receiver that got nothing.
class ZeroPayloadError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration refused because the input is too large.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace symdens
