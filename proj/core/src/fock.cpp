#include "rabi/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rabi/detail/jacobi.hpp"
#include "rabi/error.hpp"

namespace rabi {

std::span<const double> OracleSpectrum::trusted() const& {
  return std::span<const double>(eigenvalues).first(eigenvalues.size() / 3);
}

TruncatedHamiltonian build_matrix(const ModelParams& params, std::size_t n_max) {
  params.validate();
  TruncatedHamiltonian h;
  h.n_max = n_max;
  h.dim = 2 * (n_max + 1);
  h.entries.assign(h.dim * h.dim, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return h.entries[r * h.dim + c]; };
  for (std::size_t n = 0; n <= n_max; ++n) {
    for (std::size_t s = 0; s < 2; ++s) {
      const std::size_t i = 2 * n + s;
      at(i, i) = static_cast<double>(n);
      at(2 * n + (1 - s), i) = params.delta;
      if (n < n_max) {
        const double sigma = s == 0 ? 1.0 : -1.0;
        const std::size_t j = 2 * (n + 1) + s;
        const double v = sigma * params.g * std::sqrt(static_cast<double>(n + 1));
        at(j, i) = v;
        at(i, j) = v;
      }
    }
  }
  return h;
}

OracleSpectrum eigenvalues(const TruncatedHamiltonian& h, double tol) {
  auto sys = detail::jacobi_eigensystem(h.entries, h.dim, tol, false);
  OracleSpectrum out;
  out.n_max = h.n_max;
  out.eigenvalues = std::move(sys.values);
  out.offdiag_norm_final = sys.offdiag_norm;
  return out;
}

double oracle_gap(double x, const ModelParams& params, std::size_t n_max, double tol) {
  const auto spectrum = eigenvalues(build_matrix(params, n_max), tol);
  const double shift = params.g * params.g;
  double best = std::numeric_limits<double>::infinity();
  for (double e : spectrum.trusted()) best = std::min(best, std::abs(x - (e + shift)));
  return best;
}

double ConvergenceTable::max_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < levels.size(); ++j) {
    for (std::size_t i = 0; i < levels[j].size(); ++i) {
      worst = std::max(worst, levels[j][i] - levels[j - 1][i]);
    }
  }
  return worst;
}

double ConvergenceTable::final_change() const {
  if (levels.size() < 2) return 0.0;
  const auto& last = levels.back();
  const auto& before = levels[levels.size() - 2];
  double worst = 0.0;
  for (std::size_t i = 0; i < last.size(); ++i) {
    worst = std::max(worst, std::abs(last[i] - before[i]));
  }
  return worst;
}

ConvergenceTable convergence_study(const ModelParams& params, std::span<const std::size_t> n_list,
                                   std::size_t k) {
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end())) {
    throw SolverError(ErrorKind::InvalidArgument, "truncations must be non-empty and ascending");
  }
  if (k > 2 * (n_list.front() + 1)) {
    throw SolverError(ErrorKind::InvalidArgument, "more levels requested than the smallest basis holds");
  }
  ConvergenceTable table;
  table.n_list.assign(n_list.begin(), n_list.end());
  for (std::size_t n : n_list) {
    const auto spectrum = eigenvalues(build_matrix(params, n));
    table.levels.emplace_back(spectrum.eigenvalues.begin(),
                              spectrum.eigenvalues.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return table;
}

}  // namespace rabi
