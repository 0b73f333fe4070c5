#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tbrl {

// Root of every error the library throws. Catch this at tool boundaries.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PoolExhausted : public Error {
 public:
  using Error::Error;
};

// Raised when a caller steps with an action that is not currently admissible.
// This is a harness bug, never an agent failure.
class InadmissibleAction : public Error {
 public:
  using Error::Error;
};

class EpisodeFinished : public Error {
 public:
  using Error::Error;
};

class UnknownTemplateSet : public Error {
 public:
  using Error::Error;
};

class MissingAlternate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NumericFault : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class VocabMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace tbrl
