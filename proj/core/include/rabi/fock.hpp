#pragma once

// Independent check on the Hill-determinant spectrum: the Hamiltonian in a
// truncated number-state basis, diagonalized by cyclic Jacobi rotations.

#include <cstddef>
#include <span>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

/// Dense real symmetric matrix in the basis index = 2 n + s, where n is the
/// boson number and s = 0 / 1 encodes sigma_z = +1 / -1.
struct TruncatedHamiltonian {
  std::size_t n_max = 0;
  std::size_t dim = 0;
  std::vector<double> entries;  // row-major dim x dim

  double operator()(std::size_t row, std::size_t col) const { return entries[row * dim + col]; }
};

struct OracleSpectrum {
  std::size_t n_max = 0;
  std::vector<double> eigenvalues;  // ascending
  double offdiag_norm_final = 0.0;

  /// Lowest floor(dim / 3) eigenvalues, the part converged in the truncation.
  std::span<const double> trusted() const&;
  std::span<const double> trusted() const&& = delete;
};

TruncatedHamiltonian build_matrix(const ModelParams& params, std::size_t n_max);

/// Throws SolverError(NotConverged) if 100 sweeps do not bring the
/// off-diagonal Frobenius norm under tol * ||H||_F.
OracleSpectrum eigenvalues(const TruncatedHamiltonian& h, double tol = 1e-13);

/// min_k |x - (E_k + g^2)| over the trusted part of the truncated spectrum.
double oracle_gap(double x, const ModelParams& params, std::size_t n_max = 80,
                  double tol = 1e-13);

struct ConvergenceTable {
  std::vector<std::size_t> n_list;
  /// levels[j][i]: level i at truncation n_list[j].
  std::vector<std::vector<double>> levels;

  /// Largest level-wise increase between successive truncations (should be
  /// <= 0 up to roundoff: truncation is a compression of the operator).
  double max_increase() const;
  /// Largest level-wise change between the last two truncations.
  double final_change() const;
};

ConvergenceTable convergence_study(const ModelParams& params, std::span<const std::size_t> n_list,
                                   std::size_t k);

}  // namespace rabi
