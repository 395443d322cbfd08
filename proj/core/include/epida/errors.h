#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epida {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller's data (length mismatch, empty input...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid knob value (non-positive epsilon, alpha outside [0,1], unknown format).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite gradient or parameter during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Remote scorer answered, but the answer violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Remote scorer could not be reached after all retry attempts.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace epida
