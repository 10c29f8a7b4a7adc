#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rabi {

enum class ErrorKind {
  InvalidArgument,
  NotConverged,
  NegativeIntegerGuard,
  Overflow,
  DivisionByZeroC,
  ResidualTooLarge,
  NullSpaceNotFound,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Thrown by the solver, oracle and atlas routines. `kind()` lets callers map
/// failures onto exit codes without parsing messages.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rabi
