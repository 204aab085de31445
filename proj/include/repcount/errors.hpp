#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace repcount {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input or a precondition violated by the caller.
class InputError : public Error {
public:
  using Error::Error;
};

/// Syntax error in a textual form or coefficient list.
class ParseError : public InputError {
public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// A computation would exceed its configured work or memory limit.
class BudgetExceeded : public Error {
public:
  BudgetExceeded(const std::string& what, double estimate)
      : Error(what + " (estimated " + format_estimate(estimate) + ")"),
        estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

private:
  static std::string format_estimate(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  double estimate_;
};

} // namespace repcount
