#include "rabi/recurrence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "rabi/error.hpp"

namespace rabi {
namespace {

// Number of most recent levels used by the 1/m extrapolation.
constexpr std::size_t kExtrapolationWindow = 6;

double step_factor(double m, double x) {
  const double mx = m + x;
  const double m2 = m * m;
  return (mx * mx) / (m2 * m2);
}

// Polynomial extrapolation in h to h = 0 through the given points (Neville).
double extrapolate_to_zero(std::span<const double> h, std::span<const double> y) {
  std::array<double, kExtrapolationWindow> p{};
  const std::size_t n = y.size();
  std::copy(y.begin(), y.end(), p.begin());
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      p[i] = (h[i] * p[i - 1] - h[i - k] * p[i]) / (h[i] - h[i - k]);
    }
  }
  return p[n - 1];
}

// First checkpoint: past the pre-asymptotic stretch where a_m and the step
// factor still vary on the scale of x, g and delta.
std::size_t first_level(std::size_t lo, double x, const ModelParams& p) {
  const double reach = 2.0 * (static_cast<double>(lo) + std::abs(x) +
                               4.0 * p.g * p.g + std::abs(p.delta));
  std::size_t m = 16;
  while (static_cast<double>(m) < reach || m < lo + 2) m *= 2;
  return m;
}

HillEvaluation normalized_limit(std::size_t lo, double x, const ModelParams& p,
                                const SolverOptions& opts) {
  const double g2x4 = 4.0 * p.g * p.g;
  const double d2 = p.delta * p.delta;
  auto a_at = [&](double m) { return (m - x) * (m - x + g2x4) - d2; };
  // b_{m-1} c_m
  auto bc_at = [&](double m) {
    return (2.0 * p.g * m * (m - 1.0 - x)) * (2.0 * p.g * (m - x));
  };

  HillEvaluation out;
  double prev2 = a_at(static_cast<double>(lo));
  double prev1 = 0.0;
  {
    const double m = static_cast<double>(lo + 1);
    prev1 = step_factor(m, x) * (a_at(m) * prev2 - bc_at(m) * 1.0);
  }
  out.scale = std::max(std::abs(prev2), std::abs(prev1));

  std::array<double, kExtrapolationWindow> hs{};
  std::array<double, kExtrapolationWindow> ys{};
  std::size_t levels = 0;
  double estimate = prev1;
  std::size_t stable = 0;
  bool have_estimate = false;

  std::size_t next_level = first_level(lo, x, p);
  std::size_t m_index = lo + 1;
  double f_prev = step_factor(static_cast<double>(lo + 1), x);

  while (next_level <= opts.m_max) {
    for (std::size_t mi = m_index + 1; mi <= next_level; ++mi) {
      const double m = static_cast<double>(mi);
      const double f = step_factor(m, x);
      const double cur = f * (a_at(m) * prev1 - f_prev * bc_at(m) * prev2);
      prev2 = prev1;
      prev1 = cur;
      f_prev = f;
      out.scale = std::max(out.scale, std::abs(cur));
    }
    m_index = next_level;

    if (levels == kExtrapolationWindow) {
      std::rotate(hs.begin(), hs.begin() + 1, hs.end());
      std::rotate(ys.begin(), ys.begin() + 1, ys.end());
      --levels;
    }
    hs[levels] = 1.0 / static_cast<double>(next_level);
    ys[levels] = prev1;
    ++levels;

    const double next_estimate = extrapolate_to_zero(
        std::span<const double>(hs.data(), levels), std::span<const double>(ys.data(), levels));
    if (have_estimate) {
      out.last_increment = std::abs(next_estimate - estimate);
      if (out.last_increment <= opts.tol * std::max(1.0, std::abs(next_estimate))) {
        ++stable;
      } else {
        stable = 0;
      }
    }
    estimate = next_estimate;
    have_estimate = true;
    out.m_used = next_level;
    if (stable >= opts.stable_steps) {
      out.converged = true;
      break;
    }
    next_level *= 2;
  }

  if (!have_estimate) {
    // m_max below the first checkpoint: plain partial value, unconverged.
    for (std::size_t mi = m_index + 1; mi <= opts.m_max; ++mi) {
      const double m = static_cast<double>(mi);
      const double f = step_factor(m, x);
      const double cur = f * (a_at(m) * prev1 - f_prev * bc_at(m) * prev2);
      out.last_increment = std::abs(cur - prev1);
      prev2 = prev1;
      prev1 = cur;
      f_prev = f;
      out.scale = std::max(out.scale, std::abs(cur));
    }
    estimate = prev1;
    out.m_used = std::max(opts.m_max, lo + 1);
  }
  out.value = estimate;
  return out;
}

}  // namespace

CoefficientTriple coefficients(std::size_t m, SpectralVariable x,
                               const ModelParams& params) noexcept {
  const double mx = static_cast<double>(m) - x.x;
  return {mx * (mx + 4.0 * params.g * params.g) - params.delta * params.delta,
          2.0 * params.g * (static_cast<double>(m) + 1.0) * mx,
          2.0 * params.g * mx};
}

double finite_determinant(std::ptrdiff_t lo, std::ptrdiff_t hi, SpectralVariable x,
                          const ModelParams& params) {
  if (lo < 0 || hi < lo - 1) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "finite_determinant requires lo >= 0 and hi >= lo - 1");
  }
  double d_prev2 = 0.0;
  double d_prev1 = 1.0;
  for (std::ptrdiff_t k = lo; k <= hi; ++k) {
    const auto here = coefficients(static_cast<std::size_t>(k), x, params);
    double d = here.a * d_prev1;
    if (k > lo) {
      const auto below = coefficients(static_cast<std::size_t>(k - 1), x, params);
      d -= below.b * here.c * d_prev2;
    }
    if (!std::isfinite(d)) {
      throw SolverError(ErrorKind::Overflow,
                        "finite determinant overflowed at index " + std::to_string(k));
    }
    d_prev2 = d_prev1;
    d_prev1 = d;
  }
  return d_prev1;
}

bool near_negative_integer(double x, double band) noexcept {
  if (x > -1.0 + band) return false;
  return std::abs(x - std::round(x)) < band;
}

std::vector<double> normalized_partials(std::size_t lo, SpectralVariable x,
                                        const ModelParams& params, std::size_t m_hi) {
  std::vector<double> out;
  if (m_hi < lo) return out;
  out.reserve(m_hi - lo + 1);
  const double xv = x.x;
  auto a_at = [&](std::size_t m) { return coefficients(m, x, params).a; };
  auto bc_at = [&](std::size_t m) {
    return coefficients(m - 1, x, params).b * coefficients(m, x, params).c;
  };
  out.push_back(a_at(lo));
  if (m_hi == lo) return out;
  out.push_back(step_factor(static_cast<double>(lo + 1), xv) *
                (a_at(lo + 1) * out[0] - bc_at(lo + 1)));
  for (std::size_t m = lo + 2; m <= m_hi; ++m) {
    const double f = step_factor(static_cast<double>(m), xv);
    const double f_prev = step_factor(static_cast<double>(m - 1), xv);
    const std::size_t i = m - lo;
    out.push_back(f * a_at(m) * out[i - 1] - f * f_prev * bc_at(m) * out[i - 2]);
  }
  return out;
}

HillEvaluation hill_determinant(SpectralVariable x, const ModelParams& params,
                                const SolverOptions& opts) {
  params.validate();
  opts.validate();
  if (!std::isfinite(x.x)) {
    throw SolverError(ErrorKind::InvalidArgument, "x must be finite");
  }
  if (near_negative_integer(x.x)) {
    throw SolverError(ErrorKind::NegativeIntegerGuard,
                      "x = " + std::to_string(x.x) + " lies in the negative-integer guard band");
  }
  return normalized_limit(0, x.x, params, opts);
}

HillEvaluation tail_limit(std::size_t n, const ModelParams& params, const SolverOptions& opts) {
  params.validate();
  opts.validate();
  return normalized_limit(n + 1, static_cast<double>(n), params, opts);
}

double recurrence_residual(std::span<const double> q, std::size_t offset, SpectralVariable x,
                           const ModelParams& params) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const auto co = coefficients(offset + i, x, params);
    const double below = i == 0 ? 0.0 : q[i - 1];
    const double r = -co.c * below + co.a * q[i] - co.b * q[i + 1];
    const double s = std::max({1.0, std::abs(co.a), std::abs(co.b), std::abs(co.c)});
    worst = std::max(worst, std::abs(r) / s);
  }
  return worst;
}

MinimalSolution minimal_solution(SpectralVariable x, const ModelParams& params,
                                 std::size_t start, std::size_t length,
                                 const MillerOptions& opts) {
  params.validate();
  if (length == 0) {
    throw SolverError(ErrorKind::InvalidArgument, "length must be positive");
  }
  MinimalSolution out;
  out.start = start;
  out.q.assign(length, 0.0);

  if (params.g == 0.0) {
    // Diagonal recurrence: a_k q_k = 0 row by row.
    for (std::size_t k = start; k < start + length; ++k) {
      const double mx = static_cast<double>(k) - x.x;
      const double s = std::max({1.0, mx * mx, params.delta * params.delta});
      if (std::abs(coefficients(k, x, params).a) <= opts.residual_bound * s) {
        out.q[k - start] = 1.0;
        out.residual = std::abs(coefficients(k, x, params).a) / s;
        return out;
      }
    }
    throw SolverError(ErrorKind::ResidualTooLarge,
                      "decoupled recurrence has no vanishing a_k in the window");
  }

  const std::size_t depth =
      opts.depth != 0 ? opts.depth : std::max(4 * (start + length), start + 200);
  if (depth < start + length) {
    throw SolverError(ErrorKind::InvalidArgument, "Miller depth must exceed the window");
  }
  out.depth = depth;

  for (std::size_t k = start + 1; k <= depth; ++k) {
    if (std::abs(static_cast<double>(k) - x.x) <= 1e-12 * static_cast<double>(k)) {
      throw SolverError(ErrorKind::DivisionByZeroC,
                        "c_k vanishes at k = " + std::to_string(k) + " inside the Miller range");
    }
  }

  // work[i] holds q_{start+i}, i = 0..depth+1-start.
  std::vector<double> work(depth + 2 - start, 0.0);
  work[depth - start] = 1.0;
  constexpr double kRescaleAbove = 1e150;
  for (std::size_t k = depth; k > start; --k) {
    const auto co = coefficients(k, x, params);
    const std::size_t i = k - start;
    const double next = (co.a * work[i] - co.b * work[i + 1]) / co.c;
    work[i - 1] = next;
    if (std::abs(next) > kRescaleAbove) {
      for (std::size_t j = i - 1; j < work.size(); ++j) work[j] /= kRescaleAbove;
    }
  }

  double peak = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    peak = std::max(peak, std::abs(work[i]));
  }
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw SolverError(ErrorKind::ResidualTooLarge, "backward recursion produced no usable solution");
  }
  std::vector<double> window(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(length + 1));
  for (double& v : window) v /= peak;

  out.residual = recurrence_residual(window, start, x, params);
  std::copy(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(length), out.q.begin());
  if (out.residual > opts.residual_bound) {
    throw SolverError(ErrorKind::ResidualTooLarge,
                      "minimal solution residual " + std::to_string(out.residual) +
                          " exceeds bound; x is not a root");
  }
  return out;
}

}  // namespace rabi
