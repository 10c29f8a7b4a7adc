#pragma once

// Zero curves of the exceptional-level conditions in the (g, delta) plane at
// x = n: the Judd determinant J_n and the normalized tail limit F_n.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

struct GridRegion {
  double g_min = 0.0;
  double g_max = 1.2;
  double delta_min = -3.0;
  double delta_max = 3.0;
  std::size_t nx = 400;  // nodes along g
  std::size_t ny = 400;  // nodes along delta

  /// Default region for level n: g in [0, 1.2], delta in [-n-3, n+3], 400 x 400.
  static GridRegion defaults_for(std::size_t n);

  void validate() const;
  double g_at(std::size_t i) const;
  double delta_at(std::size_t j) const;
  double cell_diagonal() const;
};

enum class FieldKind { Judd, Tail };

std::string_view to_string(FieldKind kind) noexcept;

/// Field value at (g, delta); nullopt marks a node that could not be evaluated.
using FieldFunction = std::function<std::optional<double>(double g, double delta)>;

FieldFunction field_function(std::size_t n, FieldKind kind, const SolverOptions& opts = {});

struct SampledField {
  GridRegion region;
  std::vector<double> values;       // index j * nx + i
  std::vector<unsigned char> mask;  // 1 = not evaluated
  FieldFunction evaluate;

  double at(std::size_t i, std::size_t j) const { return values[j * region.nx + i]; }
  bool masked(std::size_t i, std::size_t j) const { return mask[j * region.nx + i] != 0; }
  /// Median |value| over unmasked nodes; 1 if that is zero or nothing is unmasked.
  double scale() const;
};

SampledField sample_function(const GridRegion& region, FieldFunction fn, std::size_t threads = 0);

/// Judd: J_n(g, delta). Tail: F_n(g, delta), masked where it did not converge.
SampledField sample_field(std::size_t n, const GridRegion& region, FieldKind kind,
                          const SolverOptions& opts = {}, std::size_t threads = 0);

struct CurvePoint {
  double g = 0.0;
  double delta = 0.0;
};

struct Polyline {
  std::vector<CurvePoint> points;
  /// The traversal returned to its start; the first point is repeated last.
  bool cyclic = false;
};

struct ZeroSet {
  GridRegion region;
  std::vector<Polyline> polylines;
  std::size_t ambiguous_saddles = 0;
  /// Crossings whose refined value stayed above the refinement target.
  std::size_t refinement_failures = 0;
  double scale = 1.0;
};

/// Marching squares over unmasked cells. Each edge crossing is refined by
/// bisection on the field until |f| <= refine_tol * scale; saddle cells are
/// split by the sign of the corner mean.
ZeroSet extract_zero_set(const SampledField& field, double refine_tol = 1e-8,
                         std::size_t threads = 0);

struct CurvePointSet {
  std::size_t n = 0;
  FieldKind field_kind = FieldKind::Tail;
  std::size_t branch_id = 0;
  std::vector<CurvePoint> points;
  bool closed = false;
  bool on_judd = false;
};

/// closed: cyclic, or both ends on a region edge that is a symmetry axis
/// (g = 0 or delta = 0), so the branch closes under reflection. Branches
/// ending anywhere else on the boundary, or against masked cells, are open. on_judd (Tail only): every point has
/// |J_n| <= tol_judd * judd_grid.scale().
std::vector<CurvePointSet> classify_branches(std::size_t n, FieldKind kind, const ZeroSet& zeros,
                                             const SampledField& judd_grid,
                                             double tol_judd = 1e-6);

/// Tail branches whose closed flag disagrees with on_judd.
std::size_t closure_mismatches(std::span<const CurvePointSet> curves);

struct AxisIntercept {
  std::size_t branch_id = 0;
  double delta = 0.0;
  bool closed = false;
  bool on_judd = false;
};

/// Crossings of each branch with g = 0. Points with |g| <= tol count as on
/// the axis; otherwise the two points bracketing a sign change of g are
/// linearly interpolated.
std::vector<AxisIntercept> axis_intercepts(std::span<const CurvePointSet> curves, double tol);

}  // namespace rabi
