#include "cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rabi/atlas.hpp"
#include "rabi/error.hpp"
#include "rabi/fock.hpp"
#include "rabi/model.hpp"
#include "rabi/spectrum.hpp"
#include "table.hpp"

namespace rabi::cli {
namespace {

enum class Format { Csv, Json };

struct RunConfig {
  ModelParams params;
  SolverOptions opts;
  std::string output;
  Format format = Format::Csv;

  // spectrum
  double xmin = 0.0;
  double xmax = 0.0;
  double step = 0.01;
  bool validate = false;
  std::size_t ntrunc = 80;

  // exceptional / curves
  std::size_t n = 0;
  std::size_t vectors = 0;
  double tol_judd = 1e-7;
  double tol_tail = 1e-6;
  std::vector<double> region;
  std::vector<std::size_t> grid;
  std::string field = "tail";

  // oracle
  std::size_t levels = 8;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void add_common(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("-o,--output", cfg.output, "Output file (default: stdout)");
  sub.add_option("--format", cfg.format, "Output format: csv or json")
      ->transform(CLI::CheckedTransformer(
                      std::map<std::string, Format>{{"csv", Format::Csv}, {"json", Format::Json}})
                      .description(""));
  sub.add_option("--tol", cfg.opts.tol, "Relative convergence tolerance")->capture_default_str();
  sub.add_option("--mmax", cfg.opts.m_max, "Maximum recurrence index")->capture_default_str();
}

void add_params(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--g", cfg.params.g, "Coupling g")->required();
  sub.add_option("--delta", cfg.params.delta, "Qubit splitting delta")->required();
}

std::string render(const Table& table, Format format) {
  std::ostringstream os;
  if (format == Format::Csv) {
    write_csv(table, os);
  } else {
    write_json(table, os);
  }
  return os.str();
}

int emit(const RunConfig& cfg, const Table& table, std::ostream& out, std::ostream& err) {
  const std::string text = render(table, cfg.format);
  if (cfg.output.empty() || cfg.output == "-") {
    out << text;
    out.flush();
    return out ? kOk : kIoFailure;
  }
  try {
    write_atomically(cfg.output, text);
  } catch (const std::exception& e) {
    err << "error: cannot write " << cfg.output << ": " << e.what() << '\n';
    return kIoFailure;
  }
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.xmin < cfg.xmax, "--xmin must be smaller than --xmax");
  require(cfg.step > 0.0, "--step must be positive");
  require(cfg.ntrunc >= 1, "--ntrunc must be positive");

  auto roots = scan_regular(cfg.params, cfg.xmin, cfg.xmax, cfg.step, cfg.opts);
  if (cfg.validate) validate_with_oracle(roots, cfg.params, cfg.ntrunc);

  Table table{{"g", "delta", "x", "energy", "residual", "oracle_gap", "flags"}, {}};
  bool unconverged = false;
  for (const auto& r : roots) {
    unconverged = unconverged || r.flags.has(RootFlag::NotConverged);
    table.rows.push_back({cfg.params.g, cfg.params.delta, r.x, r.energy, r.residual,
                          r.oracle_gap ? Cell{*r.oracle_gap} : Cell{Blank{}},
                          r.flags.to_string()});
  }
  const int code = emit(cfg, table, out, err);
  if (code != kOk) return code;
  return unconverged ? kNotConverged : kOk;
}

int cmd_exceptional(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.tol_judd > 0.0 && cfg.tol_tail > 0.0, "tolerances must be positive");
  const auto report =
      classify_exceptional(cfg.n, cfg.params, cfg.tol_judd, cfg.tol_tail, cfg.opts);

  Table table{{"n", "judd_value", "tail_value", "case_label", "degenerate"}, {}};
  std::vector<Cell> row{static_cast<std::int64_t>(report.n), report.judd_value,
                        report.tail_value, std::string(to_string(report.case_label)),
                        report.degenerate};

  const bool has_vectors = report.case_label == ExceptionalCase::JuddDegenerate ||
                           report.case_label == ExceptionalCase::TailNondegenerate;
  if (cfg.vectors > 0) {
    table.columns.push_back("vector_judd");
    table.columns.push_back("vector_tail");
    if (has_vectors) {
      require(cfg.vectors >= cfg.n + 2, "--vectors must be at least n + 2");
      const auto vecs = exceptional_eigenvectors(cfg.n, cfg.params, report, cfg.vectors);
      if (vecs.size() == 2) {
        row.push_back(vecs[0]);
        row.push_back(vecs[1]);
      } else {
        row.push_back(Blank{});
        row.push_back(vecs[0]);
      }
    } else {
      row.push_back(Blank{});
      row.push_back(Blank{});
    }
  }
  table.rows.push_back(std::move(row));

  const int code = emit(cfg, table, out, err);
  if (code != kOk) return code;
  return report.converged ? kOk : kNotConverged;
}

int cmd_curves(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  GridRegion region = GridRegion::defaults_for(cfg.n);
  if (!cfg.region.empty()) {
    region.g_min = cfg.region[0];
    region.g_max = cfg.region[1];
    region.delta_min = cfg.region[2];
    region.delta_max = cfg.region[3];
  }
  if (!cfg.grid.empty()) {
    region.nx = cfg.grid[0];
    region.ny = cfg.grid[1];
  }
  require(region.g_min < region.g_max && region.delta_min < region.delta_max,
          "--region bounds must be increasing");
  require(region.nx >= 2 && region.ny >= 2, "--grid needs at least 2 nodes per axis");

  const auto judd = sample_field(cfg.n, region, FieldKind::Judd, cfg.opts);
  std::vector<CurvePointSet> curves;
  bool masked = false;
  auto add = [&](FieldKind kind) {
    const SampledField field =
        kind == FieldKind::Judd ? judd : sample_field(cfg.n, region, kind, cfg.opts);
    masked = masked || std::any_of(field.mask.begin(), field.mask.end(),
                                   [](unsigned char m) { return m != 0; });
    const auto zeros = extract_zero_set(field);
    auto branches = classify_branches(cfg.n, kind, zeros, judd);
    for (auto& b : branches) {
      b.branch_id = curves.size();
      curves.push_back(std::move(b));
    }
  };
  if (cfg.field == "judd" || cfg.field == "both") add(FieldKind::Judd);
  if (cfg.field == "tail" || cfg.field == "both") add(FieldKind::Tail);

  Table table{{"n", "field", "branch_id", "closed", "on_judd", "g", "delta"}, {}};
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      table.rows.push_back({static_cast<std::int64_t>(c.n), std::string(to_string(c.field_kind)),
                            static_cast<std::int64_t>(c.branch_id), c.closed, c.on_judd, p.g,
                            p.delta});
    }
  }
  const int code = emit(cfg, table, out, err);
  if (code != kOk) return code;
  return masked ? kNotConverged : kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.ntrunc >= 4, "--ntrunc must be at least 4");
  const std::array<std::size_t, 3> n_list{cfg.ntrunc / 4, cfg.ntrunc / 2, cfg.ntrunc};
  require(cfg.levels >= 1 && cfg.levels <= 2 * (n_list[0] + 1),
          "--levels exceeds the smallest truncated basis");

  const auto spectrum = eigenvalues(build_matrix(cfg.params, cfg.ntrunc));
  const auto table_data = convergence_study(cfg.params, n_list, cfg.levels);

  Table table{{"section", "n_trunc", "level", "energy"}, {}};
  for (std::size_t i = 0; i < cfg.levels; ++i) {
    table.rows.push_back({std::string("eigenvalue"), static_cast<std::int64_t>(cfg.ntrunc),
                          static_cast<std::int64_t>(i), spectrum.eigenvalues[i]});
  }
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    for (std::size_t i = 0; i < cfg.levels; ++i) {
      table.rows.push_back({std::string("convergence"), static_cast<std::int64_t>(n_list[j]),
                            static_cast<std::int64_t>(i), table_data.levels[j][i]});
    }
  }
  return emit(cfg, table, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rabi model spectrum via Hill determinants", "rabi-hill"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* spectrum = app.add_subcommand("spectrum", "Regular and exceptional roots in an x range");
  add_params(*spectrum, cfg);
  add_common(*spectrum, cfg);
  spectrum->add_option("--xmin", cfg.xmin, "Lower end of the x = E + g^2 range")->required();
  spectrum->add_option("--xmax", cfg.xmax, "Upper end of the x range")->required();
  spectrum->add_option("--step", cfg.step, "Scan grid step")->capture_default_str();
  spectrum->add_flag("--validate", cfg.validate, "Compare each root with the Fock-basis oracle");
  spectrum->add_option("--ntrunc", cfg.ntrunc, "Oracle boson truncation")->capture_default_str();

  auto* exceptional = app.add_subcommand("exceptional", "Classify the level x = n");
  exceptional->add_option("--n", cfg.n, "Level index")->required();
  add_params(*exceptional, cfg);
  add_common(*exceptional, cfg);
  exceptional->add_option("--vectors", cfg.vectors, "Emit eigenvector coefficients q_0..q_{L-1}");
  exceptional->add_option("--tolj", cfg.tol_judd, "Judd determinant tolerance")
      ->capture_default_str();
  exceptional->add_option("--tolf", cfg.tol_tail, "Tail limit tolerance")->capture_default_str();

  auto* curves = app.add_subcommand("curves", "Zero curves of J_n and F_n in the (g, delta) plane");
  curves->add_option("--n", cfg.n, "Level index")->required();
  curves->add_option("--region", cfg.region, "gmin gmax dmin dmax")->expected(4);
  curves->add_option("--grid", cfg.grid, "NX NY")->expected(2);
  curves->add_option("--field", cfg.field, "judd, tail or both")
      ->check(CLI::IsMember({"judd", "tail", "both"}))
      ->capture_default_str();
  add_common(*curves, cfg);

  auto* oracle = app.add_subcommand("oracle", "Truncated Fock-basis spectrum");
  add_params(*oracle, cfg);
  add_common(*oracle, cfg);
  oracle->add_option("--ntrunc", cfg.ntrunc, "Boson truncation N")->required();
  oracle->add_option("--levels", cfg.levels, "Number of levels")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kBadArguments;
  }

  try {
    cfg.params.validate();
    cfg.opts.validate();
    if (spectrum->parsed()) return cmd_spectrum(cfg, out, err);
    if (exceptional->parsed()) return cmd_exceptional(cfg, out, err);
    if (curves->parsed()) return cmd_curves(cfg, out, err);
    return cmd_oracle(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kBadArguments;
  } catch (const SolverError& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    if (e.kind() == ErrorKind::InvalidArgument) return kBadArguments;
    return kNotConverged;
  }
}

}  // namespace rabi::cli
