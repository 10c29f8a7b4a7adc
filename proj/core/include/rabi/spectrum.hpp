#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rabi/model.hpp"
#include "rabi/recurrence.hpp"

namespace rabi {

enum class RootFlag : unsigned {
  NearIntegerX = 1u << 0,
  NearNegativeIntegerX = 1u << 1,
  Unvalidated = 1u << 2,
  NotConverged = 1u << 3,
  // Root placed at integer x by classify_exceptional rather than by bisection.
  Exceptional = 1u << 4,
  // Doubly degenerate exceptional level (multiplicity 2).
  Degenerate = 1u << 5,
};

class RootFlags {
 public:
  constexpr RootFlags() = default;

  constexpr bool has(RootFlag f) const { return (bits_ & static_cast<unsigned>(f)) != 0; }
  constexpr void set(RootFlag f) { bits_ |= static_cast<unsigned>(f); }
  constexpr void clear(RootFlag f) { bits_ &= ~static_cast<unsigned>(f); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr unsigned bits() const { return bits_; }

  /// Flag names joined by '|', in declaration order; empty string for none.
  std::string to_string() const;

 private:
  unsigned bits_ = 0;
};

struct RootRecord {
  double x = 0.0;
  double energy = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double residual = 0.0;
  std::optional<double> oracle_gap;
  RootFlags flags;
  /// 2 for the doubly degenerate exceptional levels, 1 otherwise.
  int multiplicity = 1;
};

struct ScanOptions {
  double bracket_width = 1e-10;
  double tol_judd = 1e-7;
  double tol_tail = 1e-6;
  /// 0 = worker_count() default.
  std::size_t threads = 0;
};

/// Roots of the normalized Hill determinant in [x_lo, x_hi], ascending.
///
/// Sign changes on the grid x_lo + i*step are refined by bisection. Every
/// integer n >= 0 in range is also classified; exceptional levels replace the
/// nearby bisection roots by a record at x = n (the degenerate ones touch zero
/// without a sign change, so bisection alone cannot see them).
std::vector<RootRecord> scan_regular(const ModelParams& params, double x_lo, double x_hi,
                                     double step, const SolverOptions& opts = {},
                                     const ScanOptions& scan = {});

/// Fills oracle_gap for every record from the truncated-basis spectrum at
/// n_max, redoing the comparison once at 2 n_max if any gap falls within a
/// factor 10 of `tolerance`. Unvalidated is cleared on records whose gap is
/// within tolerance. Returns the truncation actually used.
std::size_t validate_with_oracle(std::span<RootRecord> roots, const ModelParams& params,
                                 std::size_t n_max = 80, double tolerance = 1e-6);

enum class ExceptionalCase {
  AdiabaticDeltaZero,
  JuddDegenerate,
  TailNondegenerate,
  NotExceptional,
};

std::string_view to_string(ExceptionalCase c) noexcept;

struct ExceptionalReport {
  std::size_t n = 0;
  /// J_n = det[W_0^{n-1}] at x = n.
  double judd_value = 0.0;
  double judd_scale = 1.0;
  /// Normalized tail limit at x = n.
  double tail_value = 0.0;
  double tail_scale = 1.0;
  ExceptionalCase case_label = ExceptionalCase::NotExceptional;
  bool degenerate = false;
  bool converged = true;
};

/// J_n = det[W_0^{n-1}] at x = n; J_0 = 1.
double judd_determinant(std::size_t n, const ModelParams& params);

/// max(1, |delta|^{2n}); J_n is a degree-2n polynomial in delta.
double judd_scale(std::size_t n, const ModelParams& params);

/// Resolves the exceptional level x = n in the order delta = 0, Judd, tail.
ExceptionalReport classify_exceptional(std::size_t n, const ModelParams& params,
                                       double tol_judd = 1e-7, double tol_tail = 1e-6,
                                       const SolverOptions& opts = {});

/// Coefficient vectors q_0..q_{length-1} of the exceptional level, each
/// normalized to max |q_k| = 1.
///
/// JuddDegenerate returns {finite null vector padded with zeros, tail vector};
/// TailNondegenerate returns {tail vector}. The tail vector is zero on
/// indices 0..n and follows the minimal solution of the recurrence from n+1.
std::vector<std::vector<double>> exceptional_eigenvectors(std::size_t n,
                                                          const ModelParams& params,
                                                          const ExceptionalReport& report,
                                                          std::size_t length,
                                                          const MillerOptions& opts = {});

}  // namespace rabi
