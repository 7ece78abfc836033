#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace elite {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by a caller-supplied value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Inconsistent configuration: mismatched embedding dimensions, missing keys,
// malformed config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Network failure or non-2xx response after the retry budget is exhausted.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}

  // Last HTTP status seen, 0 when the connection itself failed.
  int status() const { return status_; }

 private:
  int status_;
};

// Pool file could not be read; line() is 1-based (the header is line 1).
class LoadError : public Error {
 public:
  LoadError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "validation failed";
    for (const auto& v : items) out += "; " + v;
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace elite
