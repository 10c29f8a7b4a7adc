// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "rabi/atlas.hpp"
#include "rabi/detail/jacobi.hpp"
#include "rabi/fock.hpp"
#include "rabi/recurrence.hpp"
#include "rabi/spectrum.hpp"

namespace {

using namespace rabi;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

GridRegion region(double g0, double g1, double d0, double d1, std::size_t nx, std::size_t ny) {
  GridRegion r;
  r.g_min = g0;
  r.g_max = g1;
  r.delta_min = d0;
  r.delta_max = d1;
  r.nx = nx;
  r.ny = ny;
  return r;
}

std::size_t count_within(const std::vector<double>& values, double target, double tol) {
  return static_cast<std::size_t>(std::count_if(
      values.begin(), values.end(), [&](double v) { return std::abs(v - target) <= tol; }));
}

double nearest_other(const std::vector<double>& values, double target) {
  std::vector<double> d;
  for (double v : values) d.push_back(std::abs(v - target));
  std::sort(d.begin(), d.end());
  return d.size() > 1 ? d[1] : INFINITY;
}

Outcome judd_ellipse() {
  std::ostringstream out, err;
  const int code = cli::run({"curves", "--n", "1", "--field", "judd", "--region", "0", "1", "-1.5",
                             "1.5", "--grid", "200", "200", "--format", "json"},
                            out, err);
  if (code != cli::kOk) return {false, "exit code " + std::to_string(code) + ": " + err.str()};
  const auto doc = nlohmann::json::parse(out.str());
  double worst = 0.0;
  for (const auto& row : doc) {
    const double g = row["g"], d = row["delta"];
    worst = std::max(worst, std::abs(d * d + 4 * g * g - 1));
  }
  return {!doc.empty() && worst <= 1e-6,
          std::to_string(doc.size()) + " points, max |d^2+4g^2-1| = " + fmt("%.2e", worst)};
}

Outcome sinc_law() {
  double worst = 0.0;
  for (std::size_t n = 0; n <= 3; ++n) {
    const double ref = tail_limit(n, {0.0, 0.5}).value;
    for (double d : {0.25, 0.75, 1.5, 2.5}) {
      const double ratio = tail_limit(n, {0.0, d}).value / ref;
      const double expected = testing::sinc(d) / (2.0 / std::numbers::pi);
      worst = std::max(worst, std::abs(ratio - expected));
    }
  }
  return {worst <= 1e-4, "max ratio error " + fmt("%.2e", worst)};
}

Outcome oracle_equivalence() {
  const double lo = -1.0, hi = 6.0;
  double worst = 0.0;
  std::size_t total = 0;
  std::vector<std::string> notes;
  bool ok = true;
  for (double g : {0.3, 0.7}) {
    for (double d : {0.4, 1.2}) {
      const ModelParams p{g, d};
      std::vector<double> hill;
      for (const auto& r : scan_regular(p, lo, hi, 0.01)) {
        if (r.flags.has(RootFlag::NearNegativeIntegerX)) continue;
        for (int k = 0; k < r.multiplicity; ++k) hill.push_back(r.x);
      }
      std::vector<double> oracle;
      const auto spectrum = eigenvalues(build_matrix(p, 80));
      for (double e : spectrum.trusted()) {
        const double x = e + g * g;
        if (x >= lo && x <= hi) oracle.push_back(x);
      }
      if (hill.size() != oracle.size()) {
        ok = false;
        notes.push_back("(" + fmt("%g", g) + ", " + fmt("%g", d) + "): " +
                        std::to_string(hill.size()) + " Hill roots vs " +
                        std::to_string(oracle.size()) + " oracle levels");
        continue;
      }
      for (std::size_t i = 0; i < hill.size(); ++i)
        worst = std::max(worst, std::abs(hill[i] - oracle[i]));
      total += hill.size();
    }
  }
  ok = ok && worst <= 1e-6;
  return {ok, std::to_string(total) + " roots matched one-to-one, max gap " + fmt("%.2e", worst),
          notes};
}

Outcome degeneracy_dichotomy() {
  const ModelParams judd{0.25, std::sqrt(0.75)};
  const auto judd_levels = eigenvalues(build_matrix(judd, 80)).eigenvalues;
  const std::size_t judd_count = count_within(judd_levels, 0.9375, 1e-6);

  // Tail line of level 0 near (0.1, 1), from the refined zero set.
  const std::size_t n = 0;
  const auto field = sample_field(n, region(0.05, 0.15, 0.8, 1.2, 41, 81), FieldKind::Tail);
  const auto zeros = extract_zero_set(field);
  CurvePoint best{INFINITY, 0};
  for (const auto& line : zeros.polylines)
    for (const auto& pt : line.points)
      if (std::abs(pt.g - 0.1) < std::abs(best.g - 0.1)) best = pt;
  if (!std::isfinite(best.g)) return {false, "no tail line found near (0.1, 1)"};
  const ModelParams tail{best.g, best.delta};
  const auto report = classify_exceptional(n, tail);
  const auto tail_levels = eigenvalues(build_matrix(tail, 80)).eigenvalues;
  const double target = -tail.g * tail.g;
  const std::size_t tail_count = count_within(tail_levels, target, 1e-6);
  const double next = nearest_other(tail_levels, target);

  const bool ok = judd_count == 2 && tail_count == 1 && next >= 1e-3 &&
                  report.case_label == ExceptionalCase::TailNondegenerate;
  return {ok, "Judd point: " + std::to_string(judd_count) + " levels at 0.9375; tail point (" +
                  fmt("%.6f", tail.g) + ", " + fmt("%.9f", tail.delta) + "): " +
                  std::to_string(tail_count) + " level, next " + fmt("%.3g", next) + " away"};
}

// Roots in delta of J_n at fixed g, from sign changes on a fine grid.
std::vector<double> judd_roots(std::size_t n, double g) {
  std::vector<double> out;
  const auto j = [&](double d) { return judd_determinant(n, {g, d}); };
  const int steps = 4000;
  const double d_max = static_cast<double>(n) + 1.0;
  for (int k = 0; k < steps; ++k) {
    double lo = 1e-3 + d_max * k / steps, hi = 1e-3 + d_max * (k + 1) / steps;
    if ((j(lo) > 0) == (j(hi) > 0)) continue;
    const bool lo_pos = j(lo) > 0;
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ((j(mid) > 0) == lo_pos ? lo : hi) = mid;
    }
    out.push_back(std::abs(j(lo)) < std::abs(j(hi)) ? lo : hi);
  }
  return out;
}

Outcome subset_claim() {
  struct Sample {
    std::size_t n;
    ModelParams p;
  };
  std::vector<Sample> samples;
  for (int k = 1; samples.size() < 10; ++k) {
    const double g = 0.045 * k;
    for (double d : judd_roots(1, g))
      if (samples.size() < 10) samples.push_back({1, {g, d}});
  }
  for (int k = 1; samples.size() < 20 && k < 40; ++k) {
    const double g = 0.04 * k;
    for (double d : judd_roots(2, g))
      if (samples.size() < 20) samples.push_back({2, {g, d}});
  }
  if (samples.size() < 20) return {false, "only " + std::to_string(samples.size()) + " Judd points"};
  double worst_ratio = 0.0;
  bool ok = true;
  for (const auto& s : samples) {
    const auto r = classify_exceptional(s.n, s.p);
    if (std::abs(r.judd_value) > 1e-10 * r.judd_scale) {
      ok = false;
      continue;
    }
    const double ratio = std::abs(r.tail_value) / r.tail_scale;
    worst_ratio = std::max(worst_ratio, ratio);
    ok = ok && r.converged && ratio <= 1e-6;
  }
  return {ok, "20 Judd points (n = 1, 2), max |F|/scale = " + fmt("%.2e", worst_ratio)};
}

Outcome fig1_structure() {
  Outcome o{true, "", {}};
  std::string summary;
  for (std::size_t n = 0; n <= 3; ++n) {
    const double span = static_cast<double>(n) + 3.0;
    const auto r = region(0.0, 1.0, -span, span, 400, 400);
    const auto tail = sample_field(n, r, FieldKind::Tail);
    const auto judd = sample_field(n, r, FieldKind::Judd);
    const auto zeros = extract_zero_set(tail);
    const auto curves = classify_branches(n, FieldKind::Tail, zeros, judd);
    const auto closed = static_cast<std::size_t>(
        std::count_if(curves.begin(), curves.end(), [](const CurvePointSet& c) { return c.closed; }));
    const double cell = (r.delta_max - r.delta_min) / static_cast<double>(r.ny - 1);
    std::vector<double> open;
    for (const auto& a : axis_intercepts(curves, 1e-9))
      if (!a.closed) open.push_back(a.delta);
    bool intercepts_ok = true;
    for (double target : {1.0, 2.0}) {
      for (double sign : {-1.0, 1.0}) {
        const double want = sign * (static_cast<double>(n) + target);
        intercepts_ok = intercepts_ok && std::any_of(open.begin(), open.end(), [&](double d) {
                          return std::abs(d - want) <= 2 * cell;
                        });
      }
    }
    const bool ok = closed == n && intercepts_ok;
    o.pass = o.pass && ok;
    summary += (summary.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + ": " +
               std::to_string(closed) + " closed" + (intercepts_ok ? "" : ", intercepts missing");
    if (!ok) {
      for (const auto& c : curves) {
        if (c.closed) continue;
        const auto& a = c.points.front();
        const auto& b = c.points.back();
        if (c.on_judd)
          o.notes.push_back("n=" + std::to_string(n) + " open on_judd branch from (" +
                            fmt("%.3f", a.g) + ", " + fmt("%.3f", a.delta) + ") to (" +
                            fmt("%.3f", b.g) + ", " + fmt("%.3f", b.delta) + ")");
      }
    }
  }
  o.detail = summary;
  if (!o.pass) {
    const std::size_t n = 3;
    const auto r = region(0.0, 1.5, -6.0, 6.0, 400, 400);
    const auto curves = classify_branches(n, FieldKind::Tail,
                                          extract_zero_set(sample_field(n, r, FieldKind::Tail)),
                                          sample_field(n, r, FieldKind::Judd));
    const auto closed = std::count_if(curves.begin(), curves.end(),
                                      [](const CurvePointSet& c) { return c.closed; });
    o.notes.push_back("n=3 with g in [0, 1.5]: " + std::to_string(closed) + " closed branches");
  }
  return o;
}

Outcome brute_force() {
  std::mt19937_64 rng(1729);
  std::uniform_int_distribution<int> um(0, 12);
  std::uniform_real_distribution<double> ux(-3.0, 8.0), ug(-2.0, 2.0), ud(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = static_cast<std::size_t>(um(rng));
    const double x = ux(rng), g = ug(rng), d = ud(rng);
    const double dense = testing::cofactor_determinant(testing::assemble_w(0, m, x, g, d));
    const double rec = finite_determinant(0, static_cast<std::ptrdiff_t>(m), {x}, {g, d});
    worst = std::max(worst, std::abs(rec - dense) / std::abs(dense));
  }
  return {worst <= 1e-10, "1000 cases, max relative error " + fmt("%.2e", worst)};
}

Outcome eigensolver() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<std::size_t> udim(1, 50);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = udim(rng);
    std::vector<double> a(dim * dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = r; c < dim; ++c) a[r * dim + c] = a[c * dim + r] = nd(rng);
    const auto sys = detail::jacobi_eigensystem(a, dim, 1e-14, true);
    double norm = 0.0;
    for (double v : sys.values) norm = std::max(norm, std::abs(v));
    for (std::size_t j = 0; j < dim; ++j) {
      double res = 0.0;
      for (std::size_t r = 0; r < dim; ++r) {
        double av = 0.0;
        for (std::size_t c = 0; c < dim; ++c) av += a[r * dim + c] * sys.vectors[c * dim + j];
        res += std::pow(av - sys.values[j] * sys.vectors[r * dim + j], 2);
      }
      worst = std::max(worst, std::sqrt(res) / norm);
    }
  }
  return {worst <= 1e-8, "100 matrices, max ||Av - lv|| / ||A|| = " + fmt("%.2e", worst)};
}

double max_point_distance(const ZeroSet& zs, double dg, double dd) {
  // Distance from each reflected point to the nearest emitted point.
  std::vector<CurvePoint> all;
  for (const auto& l : zs.polylines) all.insert(all.end(), l.points.begin(), l.points.end());
  double worst = 0.0;
  for (const auto& p : all) {
    double best = INFINITY;
    for (const auto& q : all) best = std::min(best, std::hypot(dg * p.g - q.g, dd * p.delta - q.delta));
    worst = std::max(worst, best);
  }
  return worst;
}

Outcome symmetry() {
  std::vector<std::string> notes;
  bool ok = true;
  // Spectra.
  double spec_worst = 0.0;
  const ModelParams base{0.6, 0.9};
  const auto sorted_roots = [](const ModelParams& p) {
    std::vector<double> xs;
    for (const auto& r : scan_regular(p, -0.9, 5.0, 0.01))
      for (int k = 0; k < r.multiplicity; ++k) xs.push_back(r.x);
    return xs;
  };
  const auto ref_roots = sorted_roots(base);
  const auto ref_oracle = eigenvalues(build_matrix(base, 40)).eigenvalues;
  for (const ModelParams q : {ModelParams{-0.6, 0.9}, ModelParams{0.6, -0.9}, ModelParams{-0.6, -0.9}}) {
    const auto roots = sorted_roots(q);
    if (roots.size() != ref_roots.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < roots.size(); ++i)
      spec_worst = std::max(spec_worst, std::abs(roots[i] - ref_roots[i]));
    const auto oracle = eigenvalues(build_matrix(q, 40)).eigenvalues;
    for (std::size_t i = 0; i < oracle.size(); ++i)
      spec_worst = std::max(spec_worst, std::abs(oracle[i] - ref_oracle[i]));
  }
  ok = ok && spec_worst <= 1e-10;
  notes.push_back("spectra: max difference " + fmt("%.2e", spec_worst));

  // Fields.
  double field_worst = 0.0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ug(0.0, 1.2), ud(0.0, 3.0), ux(-0.9, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double g = ug(rng), d = ud(rng), x = ux(rng);
    const auto n = static_cast<std::size_t>(trial % 4);
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); };
    const double h = hill_determinant({x}, {g, d}).value;
    const double t = tail_limit(n, {g, d}).value;
    const double j = judd_determinant(n, {g, d});
    for (const auto& [sg, sd] : {std::pair{-1.0, 1.0}, std::pair{1.0, -1.0}, std::pair{-1.0, -1.0}}) {
      const ModelParams q{sg * g, sd * d};
      field_worst = std::max({field_worst, rel(hill_determinant({x}, q).value, h),
                              rel(tail_limit(n, q).value, t), rel(judd_determinant(n, q), j)});
    }
  }
  ok = ok && field_worst <= 1e-12;
  notes.push_back("fields: max relative difference " + fmt("%.2e", field_worst));

  // Curves on a region symmetric about both axes.
  const auto r = region(-1.0, 1.0, -3.0, 3.0, 121, 181);
  double curve_worst = 0.0;
  for (std::size_t n : {0u, 1u, 2u}) {
    const auto zs = extract_zero_set(sample_field(n, r, FieldKind::Tail));
    curve_worst = std::max({curve_worst, max_point_distance(zs, -1, 1), max_point_distance(zs, 1, -1)});
  }
  ok = ok && curve_worst <= r.cell_diagonal();
  notes.push_back("curves: max reflected-point distance " + fmt("%.2e", curve_worst) +
                  " (cell diagonal " + fmt("%.2e", r.cell_diagonal()) + ")");
  return {ok, "spectra, fields and curves under g -> -g, delta -> -delta", notes};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // <= 0: none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Judd ellipse (n=1)", 10, judd_ellipse},
      {2, "g=0 sinc law", 5, sinc_law},
      {3, "oracle equivalence of the regular spectrum", 120, oracle_equivalence},
      {4, "degeneracy dichotomy", 60, degeneracy_dichotomy},
      {5, "Judd zeros lie on tail zeros", 60, subset_claim},
      {6, "closed loops and axis intercepts", 600, fig1_structure},
      {7, "recurrence vs cofactor determinant", 5, brute_force},
      {8, "eigensolver residuals", 30, eigensolver},
      {9, "sign-flip symmetry", 0, symmetry},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::string timing = fmt("%.2f s", secs);
    if (c.limit_seconds > 0) timing += fmt(" / limit %.0f s", c.limit_seconds);
    std::printf("%s  %d  %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                timing.c_str());
    for (const auto& note : o.notes) std::printf("         %s\n", note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
