#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quadfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the sample space of a kernel or measure.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical integral could not be brought within its tolerance budget.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Model fitting failed (degenerate sample, singular information, no convergence).
class FitError : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra step failed (singular matrix, eigensolver breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The requested statistical route is not valid for this kernel/null pair,
/// e.g. a V-statistic spectral p-value when the null trace diverges.
class RouteRefused : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace quadfit
