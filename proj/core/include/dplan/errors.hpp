#pragma once

#include <stdexcept>
#include <string>

namespace dplan {

/// Base for every error the library raises on bad input or misuse.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant (obstacle on the start cell, bad parameters, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when the location is unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class EmptyQueueError : public Error {
 public:
  EmptyQueueError() : Error("pop from empty priority queue") {}
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Requested a result (path, cost) from a session that did not succeed.
class PlanningError : public Error {
 public:
  using Error::Error;
};

}  // namespace dplan
