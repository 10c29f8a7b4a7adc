#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rabi::detail {

struct EigenSystem {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major; column j pairs with values[j]
  double offdiag_norm = 0.0;
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a dense symmetric matrix given row-major.
/// Throws SolverError(NotConverged) after `max_sweeps` sweeps.
EigenSystem jacobi_eigensystem(std::span<const double> matrix, std::size_t dim, double tol,
                               bool want_vectors, std::size_t max_sweeps = 100);

}  // namespace rabi::detail
