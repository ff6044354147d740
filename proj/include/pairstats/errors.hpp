#pragma once

#include <stdexcept>
#include <string>

namespace pairstats {

enum class ErrorKind { Usage, Parse, Validation, Numeric };

/// Base of every exception thrown by the library. The kind selects the CLI
/// exit code.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

class UsageError : public Error {
  public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class ParseError : public Error {
  public:
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

/// Invalid argument or configuration value.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorKind::Validation, what) {}
};

/// A computation could not produce a finite answer (truncation overflow,
/// empty objective, ...).
class NumericError : public Error {
  public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

/// Process exit code for an error kind: 1 usage, 2 parse/validation, 3 numeric.
int exit_code(ErrorKind kind) noexcept;

}  // namespace pairstats
