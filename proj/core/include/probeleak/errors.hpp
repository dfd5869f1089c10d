#pragma once

#include <stdexcept>
#include <string>

namespace probeleak {

// Base of all library errors. The three subclasses map one-to-one onto the
// command-line exit codes 1, 2 and 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied an argument outside an operation's preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

// A size cap (sequence depth, enumeration count) would be exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// An internal numerical invariant failed; indicates a bug, not bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace probeleak
