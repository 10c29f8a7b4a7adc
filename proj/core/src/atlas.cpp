#include "rabi/atlas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "rabi/error.hpp"
#include "rabi/parallel.hpp"
#include "rabi/recurrence.hpp"
#include "rabi/spectrum.hpp"

namespace rabi {

GridRegion GridRegion::defaults_for(std::size_t n) {
  const double reach = static_cast<double>(n) + 3.0;
  return {0.0, 1.2, -reach, reach, 400, 400};
}

void GridRegion::validate() const {
  if (!(g_min < g_max) || !(delta_min < delta_max)) {
    throw SolverError(ErrorKind::InvalidArgument, "grid region bounds must be increasing");
  }
  if (!std::isfinite(g_min) || !std::isfinite(g_max) || !std::isfinite(delta_min) ||
      !std::isfinite(delta_max)) {
    throw SolverError(ErrorKind::InvalidArgument, "grid region bounds must be finite");
  }
  if (nx < 2 || ny < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "grid needs at least 2 x 2 nodes");
  }
}

double GridRegion::g_at(std::size_t i) const {
  if (i + 1 == nx) return g_max;
  return g_min + (g_max - g_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double GridRegion::delta_at(std::size_t j) const {
  if (j + 1 == ny) return delta_max;
  return delta_min +
         (delta_max - delta_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

double GridRegion::cell_diagonal() const {
  return std::hypot((g_max - g_min) / static_cast<double>(nx - 1),
                    (delta_max - delta_min) / static_cast<double>(ny - 1));
}

std::string_view to_string(FieldKind kind) noexcept {
  return kind == FieldKind::Judd ? "judd" : "tail";
}

FieldFunction field_function(std::size_t n, FieldKind kind, const SolverOptions& opts) {
  if (kind == FieldKind::Judd) {
    return [n](double g, double delta) -> std::optional<double> {
      return judd_determinant(n, {g, delta});
    };
  }
  return [n, opts](double g, double delta) -> std::optional<double> {
    const auto eval = tail_limit(n, {g, delta}, opts);
    if (!eval.converged) return std::nullopt;
    return eval.value;
  };
}

double SampledField::scale() const {
  std::vector<double> mags;
  mags.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (mask[k] == 0) mags.push_back(std::abs(values[k]));
  }
  if (mags.empty()) return 1.0;
  auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  return *mid > 0.0 ? *mid : 1.0;
}

SampledField sample_function(const GridRegion& region, FieldFunction fn, std::size_t threads) {
  region.validate();
  SampledField field;
  field.region = region;
  field.values.assign(region.nx * region.ny, 0.0);
  field.mask.assign(region.nx * region.ny, 0);
  field.evaluate = std::move(fn);
  parallel_for(region.ny, worker_count(threads), [&](std::size_t j) {
    const double delta = region.delta_at(j);
    for (std::size_t i = 0; i < region.nx; ++i) {
      const auto v = field.evaluate(region.g_at(i), delta);
      if (v && std::isfinite(*v)) {
        field.values[j * region.nx + i] = *v;
      } else {
        field.mask[j * region.nx + i] = 1;
      }
    }
  });
  return field;
}

SampledField sample_field(std::size_t n, const GridRegion& region, FieldKind kind,
                          const SolverOptions& opts, std::size_t threads) {
  opts.validate();
  return sample_function(region, field_function(n, kind, opts), threads);
}

namespace {

struct EdgeGeometry {
  CurvePoint from;
  CurvePoint to;
  double value_from = 0.0;
};

class EdgeIndex {
 public:
  explicit EdgeIndex(const GridRegion& r) : nx_(r.nx), ny_(r.ny) {}

  std::size_t horizontal(std::size_t i, std::size_t j) const { return j * (nx_ - 1) + i; }
  std::size_t vertical(std::size_t i, std::size_t j) const {
    return (nx_ - 1) * ny_ + j * nx_ + i;
  }

  EdgeGeometry geometry(std::size_t id, const SampledField& f) const {
    const auto& r = f.region;
    const std::size_t h_count = (nx_ - 1) * ny_;
    if (id < h_count) {
      const std::size_t j = id / (nx_ - 1);
      const std::size_t i = id % (nx_ - 1);
      return {{r.g_at(i), r.delta_at(j)}, {r.g_at(i + 1), r.delta_at(j)}, f.at(i, j)};
    }
    const std::size_t rest = id - h_count;
    const std::size_t j = rest / nx_;
    const std::size_t i = rest % nx_;
    return {{r.g_at(i), r.delta_at(j)}, {r.g_at(i), r.delta_at(j + 1)}, f.at(i, j)};
  }

 private:
  std::size_t nx_;
  std::size_t ny_;
};

struct Refined {
  CurvePoint point;
  bool ok = true;
};

Refined refine_crossing(const EdgeGeometry& e, const SampledField& field, double target) {
  const bool from_positive = e.value_from >= 0.0;
  double lo = 0.0;
  double hi = 1.0;
  auto lerp = [&](double t) {
    return CurvePoint{e.from.g + t * (e.to.g - e.from.g),
                      e.from.delta + t * (e.to.delta - e.from.delta)};
  };
  CurvePoint best = lerp(0.5);
  double best_abs = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const CurvePoint p = lerp(mid);
    const auto v = field.evaluate(p.g, p.delta);
    if (!v || !std::isfinite(*v)) break;
    if (std::abs(*v) < best_abs) {
      best_abs = std::abs(*v);
      best = p;
    }
    if (best_abs <= target) break;
    if ((*v >= 0.0) == from_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {best, best_abs <= target};
}

}  // namespace

ZeroSet extract_zero_set(const SampledField& field, double refine_tol, std::size_t threads) {
  const auto& r = field.region;
  r.validate();
  ZeroSet out;
  out.region = r;
  out.scale = field.scale();
  const EdgeIndex edges(r);

  auto positive = [&](std::size_t i, std::size_t j) { return field.at(i, j) >= 0.0; };

  std::vector<std::array<std::size_t, 2>> segments;
  for (std::size_t j = 0; j + 1 < r.ny; ++j) {
    for (std::size_t i = 0; i + 1 < r.nx; ++i) {
      if (field.masked(i, j) || field.masked(i + 1, j) || field.masked(i + 1, j + 1) ||
          field.masked(i, j + 1)) {
        continue;
      }
      const bool bl = positive(i, j);
      const bool br = positive(i + 1, j);
      const bool tr = positive(i + 1, j + 1);
      const bool tl = positive(i, j + 1);
      const std::size_t bottom = edges.horizontal(i, j);
      const std::size_t right = edges.vertical(i + 1, j);
      const std::size_t top = edges.horizontal(i, j + 1);
      const std::size_t left = edges.vertical(i, j);

      std::array<std::size_t, 4> crossing{};
      std::size_t count = 0;
      if (bl != br) crossing[count++] = bottom;
      if (br != tr) crossing[count++] = right;
      if (tr != tl) crossing[count++] = top;
      if (tl != bl) crossing[count++] = left;

      if (count == 2) {
        segments.push_back({crossing[0], crossing[1]});
      } else if (count == 4) {
        ++out.ambiguous_saddles;
        const double mean =
            0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i + 1, j + 1) + field.at(i, j + 1));
        if ((mean >= 0.0) == bl) {
          segments.push_back({bottom, right});
          segments.push_back({top, left});
        } else {
          segments.push_back({left, bottom});
          segments.push_back({right, top});
        }
      }
    }
  }

  std::map<std::size_t, std::size_t> slot;
  for (const auto& s : segments) {
    slot.emplace(s[0], 0);
    slot.emplace(s[1], 0);
  }
  std::vector<std::size_t> ids;
  ids.reserve(slot.size());
  for (auto& [id, k] : slot) {
    k = ids.size();
    ids.push_back(id);
  }

  const double target = refine_tol * out.scale;
  std::vector<Refined> points(ids.size());
  parallel_for(ids.size(), worker_count(threads), [&](std::size_t k) {
    points[k] = refine_crossing(edges.geometry(ids[k], field), field, target);
  });
  for (const auto& p : points) {
    if (!p.ok) ++out.refinement_failures;
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::array<std::size_t, 2>> adj(ids.size(), {kNone, kNone});
  auto link = [&](std::size_t a, std::size_t b) {
    auto& slots = adj[a];
    (slots[0] == kNone ? slots[0] : slots[1]) = b;
  };
  for (const auto& s : segments) {
    const std::size_t a = slot[s[0]];
    const std::size_t b = slot[s[1]];
    link(a, b);
    link(b, a);
  }

  std::vector<bool> visited(ids.size(), false);
  auto walk = [&](std::size_t start) {
    Polyline line;
    std::size_t prev = kNone;
    std::size_t cur = start;
    while (true) {
      visited[cur] = true;
      line.points.push_back(points[cur].point);
      std::size_t next = kNone;
      for (std::size_t nb : adj[cur]) {
        if (nb != kNone && nb != prev && !visited[nb]) {
          next = nb;
          break;
        }
      }
      if (next == kNone) {
        const bool back_to_start =
            line.points.size() > 2 && (adj[cur][0] == start || adj[cur][1] == start);
        if (back_to_start) {
          line.cyclic = true;
          line.points.push_back(points[start].point);
        }
        break;
      }
      prev = cur;
      cur = next;
    }
    out.polylines.push_back(std::move(line));
  };

  for (std::size_t k = 0; k < ids.size(); ++k) {
    const bool endpoint = adj[k][1] == kNone;
    if (endpoint && !visited[k]) walk(k);
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (!visited[k]) walk(k);
  }
  return out;
}

std::vector<CurvePointSet> classify_branches(std::size_t n, FieldKind kind, const ZeroSet& zeros,
                                             const SampledField& judd_grid, double tol_judd) {
  const auto& r = zeros.region;
  const double g_eps = 1e-9 * (r.g_max - r.g_min);
  const double d_eps = 1e-9 * (r.delta_max - r.delta_min);
  const bool g_axis_edge = std::abs(r.g_min) <= g_eps || std::abs(r.g_max) <= g_eps;
  const bool d_axis_edge = std::abs(r.delta_min) <= d_eps || std::abs(r.delta_max) <= d_eps;
  const double judd_threshold = tol_judd * judd_grid.scale();

  std::vector<CurvePointSet> out;
  out.reserve(zeros.polylines.size());
  for (std::size_t b = 0; b < zeros.polylines.size(); ++b) {
    const auto& line = zeros.polylines[b];
    CurvePointSet set;
    set.n = n;
    set.field_kind = kind;
    set.branch_id = b;
    set.points = line.points;

    if (line.cyclic) {
      set.closed = true;
    } else if (!line.points.empty()) {
      const auto& front = line.points.front();
      const auto& back = line.points.back();
      const bool mirror_g = g_axis_edge && std::abs(front.g) <= g_eps && std::abs(back.g) <= g_eps;
      const bool mirror_d =
          d_axis_edge && std::abs(front.delta) <= d_eps && std::abs(back.delta) <= d_eps;
      // Other open ends sit on the region boundary or against masked cells.
      set.closed = mirror_g || mirror_d;
    }

    if (kind == FieldKind::Tail && !line.points.empty()) {
      set.on_judd = std::all_of(line.points.begin(), line.points.end(), [&](const CurvePoint& p) {
        return std::abs(judd_determinant(n, {p.g, p.delta})) <= judd_threshold;
      });
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::size_t closure_mismatches(std::span<const CurvePointSet> curves) {
  return static_cast<std::size_t>(std::count_if(curves.begin(), curves.end(), [](const auto& c) {
    return c.field_kind == FieldKind::Tail && c.closed != c.on_judd;
  }));
}

std::vector<AxisIntercept> axis_intercepts(std::span<const CurvePointSet> curves, double tol) {
  std::vector<AxisIntercept> out;
  for (const auto& c : curves) {
    auto emit = [&](double delta) { out.push_back({c.branch_id, delta, c.closed, c.on_judd}); };
    const auto& pts = c.points;
    // A cyclic branch repeats its first point at the end.
    std::size_t count = pts.size();
    if (count > 1 && pts.front().g == pts.back().g && pts.front().delta == pts.back().delta) {
      --count;
    }
    for (std::size_t k = 0; k < count; ++k) {
      if (std::abs(pts[k].g) <= tol) {
        emit(pts[k].delta);
        continue;
      }
      const std::size_t next = k + 1;
      if (next >= pts.size() || std::abs(pts[next].g) <= tol) continue;
      if ((pts[k].g < 0.0) != (pts[next].g < 0.0)) {
        const double t = pts[k].g / (pts[k].g - pts[next].g);
        emit(pts[k].delta + t * (pts[next].delta - pts[k].delta));
      }
    }
  }
  return out;
}

}  // namespace rabi
