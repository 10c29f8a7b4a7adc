#pragma once

#include <cstddef>

namespace rabi {

/// Rabi model parameters in units hbar = omega = 1:
///   H = a^dag a + g sigma_z (a + a^dag) + delta sigma_x
struct ModelParams {
  double g = 0.0;
  double delta = 0.0;

  /// Throws SolverError(InvalidArgument) unless both fields are finite.
  void validate() const;
};

/// Shifted spectral variable x = E + g^2.
struct SpectralVariable {
  double x = 0.0;

  static SpectralVariable from_energy(double energy, const ModelParams& p) {
    return {energy + p.g * p.g};
  }
  double energy(const ModelParams& p) const { return x - p.g * p.g; }
};

/// Controls the normalized-determinant evaluation.
///
/// Partial products are recorded at indices m_start * 2^j and extrapolated in
/// 1/m; `tol` is applied to the change between successive extrapolated
/// estimates and must hold for `stable_steps` consecutive levels.
struct SolverOptions {
  double tol = 1e-10;
  std::size_t m_max = std::size_t{1} << 15;
  std::size_t stable_steps = 2;

  void validate() const;
};

}  // namespace rabi
