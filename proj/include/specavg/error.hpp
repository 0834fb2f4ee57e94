#pragma once

// Exception hierarchy. Every error carries a category so the CLI can report a
// single machine-parseable token on failure.

#include <stdexcept>
#include <string>
#include <string_view>

namespace specavg {

enum class ErrorCategory {
  argument,
  range,
  resource,
  configuration,
  convergence,
  unsupported,
  io,
};

constexpr std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::argument: return "argument";
    case ErrorCategory::range: return "range";
    case ErrorCategory::resource: return "resource";
    case ErrorCategory::configuration: return "configuration";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::unsupported: return "unsupported";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

/// Process exit code used by the CLI for each category.
constexpr int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::configuration: return 2;
    case ErrorCategory::range: return 3;
    case ErrorCategory::resource: return 4;
    case ErrorCategory::convergence: return 5;
    case ErrorCategory::io: return 6;
    case ErrorCategory::argument: return 7;
    case ErrorCategory::unsupported: return 8;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorCategory::range, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorCategory::resource, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what)
      : Error(ErrorCategory::configuration, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorCategory::convergence, what) {}
};

class UnsupportedStatisticError : public Error {
 public:
  explicit UnsupportedStatisticError(const std::string& what)
      : Error(ErrorCategory::unsupported, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace specavg
