#pragma once

#include <stdexcept>
#include <string>

namespace seqpoint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input (bad CSV row, missing column, bad JSON). Carries the
/// 1-based line number when one is known, 0 otherwise.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Caller supplied parameters outside their domain.
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace seqpoint
