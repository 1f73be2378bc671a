#pragma once

#include <stdexcept>
#include <string>

namespace subsearch {

// Base for every error raised by the library. Callers that only need to
// distinguish "bad input data" from programming errors catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied values was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace subsearch
