#pragma once

#include <stdexcept>
#include <string>

namespace wf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments or data that violate a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that leaves an operation with nothing to do
// (e.g. a label map whose pixels are all ignored).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// File system and format failures. Messages name the offending file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Scene placement could not be satisfied within the retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// An operation was invoked with state from a mismatched earlier call.
class InvalidState : public Error {
 public:
  using Error::Error;
};

}  // namespace wf
