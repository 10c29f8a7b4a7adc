#include "rabi/error.hpp"

#include <cmath>
#include <string>

#include "rabi/model.hpp"

namespace rabi {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NegativeIntegerGuard: return "NegativeIntegerGuard";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DivisionByZeroC: return "DivisionByZeroC";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::NullSpaceNotFound: return "NullSpaceNotFound";
  }
  return "Unknown";
}

void ModelParams::validate() const {
  if (!std::isfinite(g) || !std::isfinite(delta)) {
    throw SolverError(ErrorKind::InvalidArgument, "model parameters must be finite");
  }
}

void SolverOptions::validate() const {
  if (!(tol > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "tol must be positive");
  }
  if (m_max < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "m_max must be at least 2");
  }
  if (stable_steps < 1) {
    throw SolverError(ErrorKind::InvalidArgument, "stable_steps must be at least 1");
  }
}

}  // namespace rabi
