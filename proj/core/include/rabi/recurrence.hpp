#pragma once

// Three-term recurrence behind the Bargmann-space eigenvalue problem.
//
// With x = E + g^2 the coefficient vector q satisfies, row by row,
//
//   -c_m q_{m-1} + a_m q_m - b_m q_{m+1} = 0,
//
//   a_m = (m - x)(m - x + 4 g^2) - delta^2
//   b_m = 2 g (m + 1)(m - x)
//   c_m = 2 g (m - x)
//
// and the spectrum is the zero set of the normalized infinite determinant of
// this tridiagonal system.

#include <cstddef>
#include <span>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

struct CoefficientTriple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

CoefficientTriple coefficients(std::size_t m, SpectralVariable x,
                               const ModelParams& params) noexcept;

/// Determinant of the tridiagonal block with row/column indices lo..hi.
/// hi == lo - 1 is the empty block, whose determinant is 1.
/// Throws SolverError(Overflow) if the value leaves the double range.
double finite_determinant(std::ptrdiff_t lo, std::ptrdiff_t hi,
                          SpectralVariable x, const ModelParams& params);

/// Limit of a normalized determinant sequence plus convergence metadata.
struct HillEvaluation {
  double value = 0.0;
  std::size_t m_used = 0;
  bool converged = false;
  /// Change between the last two extrapolated estimates.
  double last_increment = 0.0;
  /// Largest |partial| seen; the magnitude the cancellation happened at.
  double scale = 0.0;
};

/// Half-width of the band around x = -1, -2, ... in which the normalized
/// determinant has artificial zeros and is not evaluated.
inline constexpr double kNegativeIntegerGuard = 1e-4;

bool near_negative_integer(double x, double band = kNegativeIntegerGuard) noexcept;

/// Raw partial values P_lo..P_{m_hi} of the normalized recurrence
///
///   P_lo     = a_lo
///   P_{lo+1} = f(lo+1) (a_{lo+1} a_lo - b_lo c_{lo+1})
///   P_m      = f(m) a_m P_{m-1} - f(m) f(m-1) b_{m-1} c_m P_{m-2}
///
/// with f(m) = (m + x)^2 / m^4. For lo = 0 this is det[W_0^m] scaled by
/// Gamma^2(m+1+x) / (Gamma^2(1+x) Gamma^4(m+1)).
std::vector<double> normalized_partials(std::size_t lo, SpectralVariable x,
                                        const ModelParams& params,
                                        std::size_t m_hi);

/// Normalized Hill determinant D(x) = lim_m P_m (lo = 0). Its zeros are the
/// regular spectrum. Throws SolverError(NegativeIntegerGuard) when x is within
/// kNegativeIntegerGuard of a negative integer. Non-convergence is reported
/// through HillEvaluation::converged, not thrown.
HillEvaluation hill_determinant(SpectralVariable x, const ModelParams& params,
                                const SolverOptions& opts = {});

/// Tail limit F_n = lim_m P_m with x = n and lo = n + 1, up to the positive
/// constant [(2n+1)!]^2 / ((n+1)!)^4. Its zeros with a nonzero Judd
/// determinant are the non-degenerate exceptional levels.
HillEvaluation tail_limit(std::size_t n, const ModelParams& params,
                          const SolverOptions& opts = {});

struct MillerOptions {
  /// Backward-recursion start index; 0 selects max(4 (start+length), start+200).
  std::size_t depth = 0;
  double residual_bound = 1e-8;
};

struct MinimalSolution {
  /// q_start .. q_{start+length-1}, normalized to max |q_k| = 1.
  std::vector<double> q;
  std::size_t start = 0;
  std::size_t depth = 0;
  /// Largest scaled row residual over the retained window (see
  /// recurrence_residual), including the boundary row at `start`.
  double residual = 0.0;
};

/// Minimal (fastest decaying) solution of the recurrence on the window
/// start..start+length-1, under the boundary condition q_{start-1} = 0,
/// by Miller's backward recursion. For g = 0 the system is diagonal and the
/// solution is the unit vector at the lowest index with a_k = 0.
///
/// Throws DivisionByZeroC if x is an integer inside (start, depth], and
/// ResidualTooLarge if x does not satisfy the boundary row (x is not a root).
MinimalSolution minimal_solution(SpectralVariable x, const ModelParams& params,
                                 std::size_t start, std::size_t length,
                                 const MillerOptions& opts = {});

/// Largest scaled residual |-c_k q_{k-1} + a_k q_k - b_k q_{k+1}| /
/// max(1, |a_k|, |b_k|, |c_k|) over rows offset .. offset+q.size()-2, where
/// q[i] holds the coefficient of index offset + i and q_{offset-1} = 0.
double recurrence_residual(std::span<const double> q, std::size_t offset,
                           SpectralVariable x, const ModelParams& params);

}  // namespace rabi
