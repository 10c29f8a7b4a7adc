#include "rabi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rabi/error.hpp"
#include "rabi/fock.hpp"
#include "rabi/parallel.hpp"

namespace rabi {
namespace {

struct Sample {
  double x = 0.0;
  double value = 0.0;
  bool masked = false;
  bool converged = true;
};

Sample sample_at(double x, const ModelParams& params, const SolverOptions& opts) {
  Sample s{x};
  if (near_negative_integer(x)) {
    s.masked = true;
    return s;
  }
  const auto eval = hill_determinant({x}, params, opts);
  s.value = eval.value;
  s.converged = eval.converged;
  return s;
}

bool negative_integer_within(double lo, double hi) {
  const double first = std::ceil(lo);
  return first <= hi && first <= -1.0;
}

bool integer_within(double lo, double hi) { return std::ceil(lo) <= std::floor(hi); }

RootRecord bisect(const Sample& left, const Sample& right, const ModelParams& params,
                  const SolverOptions& opts, const ScanOptions& scan) {
  RootRecord rec;
  if (!left.converged || !right.converged) rec.flags.set(RootFlag::NotConverged);

  double lo = left.x;
  double hi = right.x;
  const bool left_negative = left.value < 0.0;
  while (hi - lo > scan.bracket_width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Sample s = sample_at(mid, params, opts);
    if (s.masked) {
      rec.flags.set(RootFlag::NearNegativeIntegerX);
      rec.flags.set(RootFlag::Unvalidated);
      break;
    }
    if (!s.converged) rec.flags.set(RootFlag::NotConverged);
    if (s.value == 0.0) {
      lo = std::nextafter(mid, left.x);
      hi = std::nextafter(mid, right.x);
      break;
    }
    if ((s.value < 0.0) == left_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  rec.x = 0.5 * (lo + hi);
  rec.x_lo = lo;
  rec.x_hi = hi;
  rec.energy = rec.x - params.g * params.g;
  if (!near_negative_integer(rec.x)) {
    rec.residual = std::abs(hill_determinant({rec.x}, params, opts).value);
  }
  return rec;
}

}  // namespace

std::string RootFlags::to_string() const {
  static constexpr std::pair<RootFlag, const char*> kNames[] = {
      {RootFlag::NearIntegerX, "NearIntegerX"},
      {RootFlag::NearNegativeIntegerX, "NearNegativeIntegerX"},
      {RootFlag::Unvalidated, "Unvalidated"},
      {RootFlag::NotConverged, "NotConverged"},
      {RootFlag::Exceptional, "Exceptional"},
      {RootFlag::Degenerate, "Degenerate"},
  };
  std::string out;
  for (const auto& [flag, name] : kNames) {
    if (!has(flag)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

std::string_view to_string(ExceptionalCase c) noexcept {
  switch (c) {
    case ExceptionalCase::AdiabaticDeltaZero: return "AdiabaticDeltaZero";
    case ExceptionalCase::JuddDegenerate: return "JuddDegenerate";
    case ExceptionalCase::TailNondegenerate: return "TailNondegenerate";
    case ExceptionalCase::NotExceptional: return "NotExceptional";
  }
  return "Unknown";
}

std::vector<RootRecord> scan_regular(const ModelParams& params, double x_lo, double x_hi,
                                     double step, const SolverOptions& opts,
                                     const ScanOptions& scan) {
  params.validate();
  opts.validate();
  if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
    throw SolverError(ErrorKind::InvalidArgument, "scan range requires x_lo < x_hi");
  }
  if (!(step > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "scan step must be positive");
  }

  const auto intervals = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / step - 1e-9));
  std::vector<Sample> grid(intervals + 1);
  parallel_for(grid.size(), worker_count(scan.threads), [&](std::size_t i) {
    const double x = i == intervals ? x_hi : x_lo + static_cast<double>(i) * step;
    grid[i] = sample_at(x, params, opts);
  });

  std::vector<RootRecord> roots;
  std::size_t prev = grid.size();
  bool masked_between = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].masked) {
      masked_between = prev != grid.size();
      continue;
    }
    if (prev != grid.size() && (grid[prev].value < 0.0) != (grid[i].value < 0.0)) {
      RootRecord rec = bisect(grid[prev], grid[i], params, opts, scan);
      if (masked_between || negative_integer_within(grid[prev].x - step, grid[i].x + step)) {
        rec.flags.set(RootFlag::NearNegativeIntegerX);
        rec.flags.set(RootFlag::Unvalidated);
      }
      if (integer_within(grid[prev].x, grid[i].x)) rec.flags.set(RootFlag::NearIntegerX);
      roots.push_back(rec);
    }
    prev = i;
    masked_between = false;
  }

  // Exceptional levels at integer x.
  const double first_n = std::max(0.0, std::ceil(x_lo));
  for (double nx = first_n; nx <= x_hi; nx += 1.0) {
    const auto n = static_cast<std::size_t>(nx);
    const auto report =
        classify_exceptional(n, params, scan.tol_judd, scan.tol_tail, opts);
    if (report.case_label == ExceptionalCase::NotExceptional) continue;

    const std::size_t replace = report.degenerate ? 2 : 1;
    for (std::size_t r = 0; r < replace; ++r) {
      auto nearest = roots.end();
      for (auto it = roots.begin(); it != roots.end(); ++it) {
        if (it->flags.has(RootFlag::Exceptional)) continue;
        if (std::abs(it->x - nx) > step) continue;
        if (nearest == roots.end() || std::abs(it->x - nx) < std::abs(nearest->x - nx)) {
          nearest = it;
        }
      }
      if (nearest != roots.end()) roots.erase(nearest);
    }

    RootRecord rec;
    rec.x = nx;
    rec.energy = nx - params.g * params.g;
    rec.x_lo = std::max(x_lo, nx - step);
    rec.x_hi = std::min(x_hi, nx + step);
    rec.residual = std::abs(hill_determinant({nx}, params, opts).value);
    rec.flags.set(RootFlag::NearIntegerX);
    rec.flags.set(RootFlag::Exceptional);
    if (!report.converged) rec.flags.set(RootFlag::NotConverged);
    rec.multiplicity = report.degenerate ? 2 : 1;
    if (report.degenerate) rec.flags.set(RootFlag::Degenerate);
    roots.push_back(rec);
  }

  std::sort(roots.begin(), roots.end(),
            [](const RootRecord& a, const RootRecord& b) { return a.x < b.x; });
  return roots;
}

std::size_t validate_with_oracle(std::span<RootRecord> roots, const ModelParams& params,
                                 std::size_t n_max, double tolerance) {
  auto gaps_at = [&](std::size_t n) {
    const auto spectrum = eigenvalues(build_matrix(params, n));
    const auto trusted = spectrum.trusted();
    const double shift = params.g * params.g;
    std::vector<double> gaps;
    gaps.reserve(roots.size());
    for (const auto& rec : roots) {
      double best = std::numeric_limits<double>::infinity();
      for (double e : trusted) best = std::min(best, std::abs(rec.x - (e + shift)));
      gaps.push_back(best);
    }
    return gaps;
  };
  auto gaps = gaps_at(n_max);
  const bool marginal = std::any_of(gaps.begin(), gaps.end(), [&](double gap) {
    return gap >= 0.1 * tolerance && gap <= 10.0 * tolerance;
  });
  if (marginal) {
    n_max *= 2;
    gaps = gaps_at(n_max);
  }
  for (std::size_t k = 0; k < roots.size(); ++k) {
    roots[k].oracle_gap = gaps[k];
    if (gaps[k] <= tolerance) roots[k].flags.clear(RootFlag::Unvalidated);
  }
  return n_max;
}

double judd_determinant(std::size_t n, const ModelParams& params) {
  return finite_determinant(0, static_cast<std::ptrdiff_t>(n) - 1,
                            {static_cast<double>(n)}, params);
}

double judd_scale(std::size_t n, const ModelParams& params) {
  return std::max(1.0, std::pow(std::abs(params.delta), 2.0 * static_cast<double>(n)));
}

ExceptionalReport classify_exceptional(std::size_t n, const ModelParams& params,
                                       double tol_judd, double tol_tail,
                                       const SolverOptions& opts) {
  params.validate();
  if (!(tol_judd > 0.0) || !(tol_tail > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "classification tolerances must be positive");
  }
  ExceptionalReport report;
  report.n = n;
  report.judd_value = judd_determinant(n, params);
  report.judd_scale = judd_scale(n, params);
  const auto tail = tail_limit(n, params, opts);
  report.tail_value = tail.value;
  report.tail_scale = std::max(tail.scale, std::numeric_limits<double>::min());
  report.converged = tail.converged;

  if (params.delta == 0.0) {
    report.case_label = ExceptionalCase::AdiabaticDeltaZero;
    report.degenerate = true;
  } else if (std::abs(report.judd_value) <= tol_judd * report.judd_scale) {
    report.case_label = ExceptionalCase::JuddDegenerate;
    report.degenerate = true;
  } else if (std::abs(report.tail_value) <= tol_tail * report.tail_scale) {
    report.case_label = ExceptionalCase::TailNondegenerate;
    report.degenerate = false;
  } else {
    report.case_label = ExceptionalCase::NotExceptional;
    report.degenerate = false;
  }
  return report;
}

namespace {

std::vector<double> judd_vector(std::size_t n, const ModelParams& params, std::size_t length,
                                double bound) {
  if (n == 0) {
    throw SolverError(ErrorKind::NullSpaceNotFound, "W_0^{-1} is empty; J_0 = 1");
  }
  const SpectralVariable x{static_cast<double>(n)};
  std::vector<double> q(length, 0.0);
  if (params.g == 0.0) {
    // Diagonal block: the null vector is the unit vector at the vanishing a_k.
    for (std::size_t k = 0; k < n; ++k) {
      const double mk = static_cast<double>(k) - x.x;
      const double s = std::max({1.0, mk * mk, params.delta * params.delta});
      if (std::abs(coefficients(k, x, params).a) <= bound * s) {
        q[k] = 1.0;
        return q;
      }
    }
    throw SolverError(ErrorKind::NullSpaceNotFound, "no vanishing diagonal entry in W_0^{n-1}");
  }

  // Forward substitution through rows 0..n-2 with q_0 = 1.
  std::vector<double> block(n + 1, 0.0);
  block[0] = 1.0;
  for (std::size_t k = 0; k + 2 <= n; ++k) {
    const auto co = coefficients(k, x, params);
    const double below = k == 0 ? 0.0 : block[k - 1];
    block[k + 1] = (co.a * block[k] - co.c * below) / co.b;
  }
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, std::abs(block[k]));
  for (std::size_t k = 0; k < n && k < length; ++k) q[k] = block[k] / peak;
  return q;
}

std::vector<double> tail_vector(std::size_t n, const ModelParams& params, std::size_t length,
                                const MillerOptions& opts) {
  std::vector<double> q(length, 0.0);
  const auto sol =
      minimal_solution({static_cast<double>(n)}, params, n + 1, length - n - 1, opts);
  std::copy(sol.q.begin(), sol.q.end(), q.begin() + static_cast<std::ptrdiff_t>(n + 1));
  return q;
}

}  // namespace

std::vector<std::vector<double>> exceptional_eigenvectors(std::size_t n,
                                                          const ModelParams& params,
                                                          const ExceptionalReport& report,
                                                          std::size_t length,
                                                          const MillerOptions& opts) {
  params.validate();
  if (report.case_label != ExceptionalCase::JuddDegenerate &&
      report.case_label != ExceptionalCase::TailNondegenerate) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "eigenvectors are built only for Judd and tail cases");
  }
  if (length < n + 2) {
    throw SolverError(ErrorKind::InvalidArgument, "length must be at least n + 2");
  }
  const SpectralVariable x{static_cast<double>(n)};
  std::vector<std::vector<double>> out;

  if (report.case_label == ExceptionalCase::JuddDegenerate) {
    auto q = judd_vector(n, params, length, opts.residual_bound);
    const double r = recurrence_residual(q, 0, x, params);
    if (r > opts.residual_bound) {
      throw SolverError(ErrorKind::NullSpaceNotFound,
                        "Judd block has no null vector (row residual " + std::to_string(r) + ")");
    }
    out.push_back(std::move(q));
  }

  auto tail = tail_vector(n, params, length, opts);
  const double r = recurrence_residual(tail, 0, x, params);
  if (r > opts.residual_bound) {
    throw SolverError(ErrorKind::ResidualTooLarge,
                      "tail vector residual " + std::to_string(r) + " exceeds bound");
  }
  out.push_back(std::move(tail));
  return out;
}

}  // namespace rabi
