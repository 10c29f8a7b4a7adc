#include "rabi/detail/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rabi/error.hpp"

namespace rabi::detail {
namespace {

double offdiag_norm(const std::vector<double>& a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) sum += a[p * n + q] * a[p * n + q];
  }
  return std::sqrt(2.0 * sum);
}

}  // namespace

EigenSystem jacobi_eigensystem(std::span<const double> matrix, std::size_t dim, double tol,
                               bool want_vectors, std::size_t max_sweeps) {
  if (matrix.size() != dim * dim) {
    throw SolverError(ErrorKind::InvalidArgument, "matrix size does not match dimension");
  }
  if (!(tol > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "Jacobi tolerance must be positive");
  }
  const std::size_t n = dim;
  std::vector<double> a(matrix.begin(), matrix.end());
  std::vector<double> v;
  if (want_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);

  EigenSystem out;
  double off = offdiag_norm(a, n);
  while (off > tol * frob) {
    if (out.sweeps == max_sweeps) {
      throw SolverError(ErrorKind::NotConverged,
                        "Jacobi iteration did not converge in " + std::to_string(max_sweeps) +
                            " sweeps (off-diagonal norm " + std::to_string(off) + ")");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a[p * n + p] -= t * apq;
        a[q * n + q] += t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a[r * n + p];
          const double arq = a[r * n + q];
          const double new_rp = c * arp - s * arq;
          const double new_rq = s * arp + c * arq;
          a[r * n + p] = a[p * n + r] = new_rp;
          a[r * n + q] = a[q * n + r] = new_rq;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            const double vrp = v[r * n + p];
            const double vrq = v[r * n + q];
            v[r * n + p] = c * vrp - s * vrq;
            v[r * n + q] = s * vrp + c * vrq;
          }
        }
      }
    }
    ++out.sweeps;
    off = offdiag_norm(a, n);
  }
  out.offdiag_norm = off;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = a[order[j] * n + order[j]];
  if (want_vectors) {
    out.vectors.resize(n * n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) out.vectors[r * n + j] = v[r * n + order[j]];
    }
  }
  return out;
}

}  // namespace rabi::detail
