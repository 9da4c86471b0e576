#pragma once

#include <stdexcept>
#include <string>

namespace entrans {

// Base of every exception thrown by the library. The CLI maps subclasses
// onto exit codes, so keep the hierarchy shallow.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: bad grid, bad config, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not produce a result (normalization, stability,
// singular systems, escaped particles).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace entrans
