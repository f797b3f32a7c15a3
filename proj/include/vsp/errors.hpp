#pragma once

#include <stdexcept>
#include <string>

namespace vsp {

/// Process exit codes shared by every CLI verb.
enum class ExitCode : int {
  ok = 0,
  validation = 1,
  horizon = 2,
  uncovered = 3,
  resource = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode code() const noexcept = 0;
};

/// Malformed input: bad config, out-of-range agent, wrong arithmetic mode.
class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::validation; }
};

/// Parameters fall in a region without a closed-form limit law.
class UncoveredRegimeError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::uncovered; }
};

/// A configured resource cap (enumeration support size) was exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::resource; }
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::validation; }
};

}  // namespace vsp
