#include "eec/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "eec/bigfloat.hpp"
#include "eec/central.hpp"
#include "eec/errors.hpp"
#include "eec/io.hpp"
#include "eec/montecarlo.hpp"
#include "eec/noncentral2x2.hpp"
#include "eec/ode.hpp"
#include "json.hpp"

namespace eec {
namespace {

struct Common {
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
  std::uint64_t seed = 0;
  std::string x_list;
  std::string x_range;
  bool eigen_scale = false;
};

void add_output_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output path (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_grid_options(CLI::App* cmd, Common& c) {
  auto* list = cmd->add_option("--x", c.x_list, "Threshold list a,b,c");
  auto* range = cmd->add_option("--x-range", c.x_range, "Threshold range start:stop:step");
  list->excludes(range);
  cmd->add_flag("--eigen-scale", c.eigen_scale, "Thresholds apply to eigenvalues (x^2 scale)");
}

void add_parallel_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--workers", c.workers, "Worker threads (0: all cores)");
  cmd->add_option("--seed", c.seed, "Random seed");
}

std::vector<double> grid(const Common& c) {
  if (c.x_list.empty() && c.x_range.empty()) throw DomainError("one of --x or --x-range is required");
  std::vector<double> xs = parse_grid(c.x_list.empty() ? c.x_range : c.x_list);
  for (double x : xs)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("thresholds must be finite and nonnegative");
  return xs;
}

// Threshold on the singular-value scale.
double sigma_threshold(const Common& c, double x) { return c.eigen_scale ? std::sqrt(x) : x; }

OutputFormat output_format(const Common& c) { return c.format == "json" ? OutputFormat::Json : OutputFormat::Csv; }

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + c.out + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("cannot write '" + c.out + "'");
}

void emit_table(const Common& c, const Table& t, std::ostream& out) {
  std::ostringstream os;
  write_table(os, t, output_format(c));
  emit(c, os.str(), out);
}

// ---- central ---------------------------------------------------------------

struct CentralArgs {
  int m = 3;
  int n = 3;
  double s = 1.0;
  std::string exponent = "symmetric";
};

int run_central(const Common& c, const CentralArgs& a, std::ostream& out) {
  const CentralSpec spec{a.m, a.n, a.s};
  spec.validate();
  const ExponentMode mode = a.exponent == "literal" ? ExponentMode::Literal : ExponentMode::Symmetric;
  Table t{{"x", "value", "asymptote", "delta_asymptote"}, {}};
  for (double x : grid(c)) {
    const double y = sigma_threshold(c, x);
    const double asym = y > 0.0 ? tail_asymptotic_leading(spec, y) : std::nan("");
    const double delta = y > 0.0 ? approximation_error_asymptotic(spec, y, mode) : std::nan("");
    t.rows.push_back({x, expected_euler_central(spec, y), asym, delta});
  }
  emit_table(c, t, out);
  return kExitOk;
}

// ---- nc2 -------------------------------------------------------------------

struct Nc2Args {
  Params2x2 p;
  QuadratureSpec q;
  double sigma_max = 0.0;
  double b_max = 0.0;
  bool rational = false;
};

int run_nc2(const Common& c, Nc2Args a, std::ostream& out, std::ostream& err) {
  if (a.sigma_max > 0.0) a.q.sigma_max = a.sigma_max;
  if (a.b_max > 0.0) a.q.b_max = a.b_max;
  a.q.workers = c.workers;
  Table t{{"x", "value", "achieved_tol", "converged"}, {}};
  bool all_converged = true;
  for (double x : grid(c)) {
    const double y = sigma_threshold(c, x);
    const QuadratureResult r = a.rational ? expected_euler_2x2_rational(a.p, y, a.q) : expected_euler_2x2(a.p, y, a.q);
    all_converged = all_converged && r.converged;
    t.rows.push_back({x, r.value, r.error_estimate, r.converged});
  }
  emit_table(c, t, out);
  if (!all_converged) {
    err << "eec nc2: tolerance not reached at maximum refinement; best values reported\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

// ---- mc --------------------------------------------------------------------

struct ParamArgs {
  std::string params_file;
  int m = 0;
  int n = 0;
  double s = 1.0;
  std::string scales;
  std::string mean;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

void add_param_options(CLI::App* cmd, ParamArgs& a) {
  cmd->add_option("--params", a.params_file, "Parameter file {m, n, scales, mean}");
  cmd->add_option("--m", a.m, "Rows of A");
  cmd->add_option("--n", a.n, "Columns of A");
  cmd->add_option("--s", a.s, "Common precision scale when --scales is absent");
  cmd->add_option("--scales", a.scales, "Comma list s_1..s_m");
  cmd->add_option("--mean", a.mean, "Row-major mean entries (with --rows/--cols)");
  cmd->add_option("--rows", a.rows, "Rows of --mean");
  cmd->add_option("--cols", a.cols, "Columns of --mean");
}

Matrix inline_matrix(const std::string& values, std::size_t rows, std::size_t cols) {
  std::vector<double> v = parse_list(values);
  if (rows == 0 && cols == 0) {
    const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (k * k != v.size()) throw DomainError("--rows/--cols required for a non-square matrix");
    rows = cols = k;
  }
  if (rows * cols != v.size()) throw DomainError("matrix entry count must equal rows * cols");
  return Matrix(rows, cols, std::move(v));
}

WishartParams resolve_params(const ParamArgs& a) {
  if (!a.params_file.empty()) return parse_params(read_file(a.params_file));
  if (a.m <= 0 || a.n <= 0) throw DomainError("either --params or --m and --n are required");
  WishartParams p = WishartParams::central(static_cast<std::size_t>(a.m), static_cast<std::size_t>(a.n), a.s);
  if (!a.scales.empty()) p.scales = parse_list(a.scales);
  if (!a.mean.empty()) {
    const std::size_t rows = a.rows ? a.rows : p.m, cols = a.cols ? a.cols : p.n;
    p.mean = inline_matrix(a.mean, rows, cols);
  }
  p.validate();
  return p;
}

struct McArgs {
  ParamArgs params;
  std::string mode = "euler";
  std::size_t samples = 100000;
  std::size_t chunk_size = 4096;
};

int run_mc(const Common& c, const McArgs& a, std::ostream& out) {
  const WishartParams p = resolve_params(a.params);
  McConfig cfg;
  cfg.n_samples = a.samples;
  cfg.seed = c.seed;
  cfg.chunk_size = a.chunk_size;
  cfg.workers = c.workers;
  cfg.scale = c.eigen_scale ? ThresholdScale::Eigen : ThresholdScale::Singular;
  const std::vector<double> xs = grid(c);
  const auto n_samples = static_cast<std::int64_t>(cfg.n_samples);
  const std::string seed = std::to_string(cfg.seed);
  Table t;
  if (a.mode == "tails") {
    t.columns.push_back("x");
    for (std::size_t i = 1; i <= p.m; ++i) {
      t.columns.push_back("p" + std::to_string(i));
      t.columns.push_back("p" + std::to_string(i) + "_stderr");
    }
    t.columns.insert(t.columns.end(), {"n_samples", "seed"});
    const auto est = estimate_eigen_tails(p, xs, cfg);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      std::vector<Cell> row{xs[k]};
      for (const TailEstimate& e : est[k]) {
        row.emplace_back(e.value);
        row.emplace_back(e.stderr_);
      }
      row.emplace_back(n_samples);
      row.emplace_back(seed);
      t.rows.push_back(std::move(row));
    }
  } else if (a.mode == "euler") {
    t.columns = {"x", "value", "stderr", "n_samples", "seed"};
    const auto est = estimate_expected_euler(p, xs, cfg);
    for (std::size_t k = 0; k < xs.size(); ++k) t.rows.push_back({xs[k], est[k].value, est[k].stderr_, n_samples, seed});
  } else {
    if (p.m < 2) throw DomainError("ratio mode needs m >= 2");
    t.columns = {"x", "ratio", "stderr", "numerator_count", "denominator_count", "defined"};
    const auto est = lemma1_ratio_curve(p, xs, cfg);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const RatioEstimate& r = est[k];
      t.rows.push_back({xs[k], r.value, r.stderr_, static_cast<std::int64_t>(r.numerator_count),
                        static_cast<std::int64_t>(r.denominator_count), r.defined});
    }
  }
  emit_table(c, t, out);
  return kExitOk;
}

// ---- canon -----------------------------------------------------------------

struct CanonArgs {
  std::string sigma_file;
  std::string sigma_values;
  std::string mean_file;
  std::string mean_values;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

int run_canon(const Common& c, const CanonArgs& a, std::ostream& out) {
  if (a.sigma_file.empty() == a.sigma_values.empty()) throw DomainError("exactly one of --sigma or --sigma-values is required");
  if (a.mean_file.empty() == a.mean_values.empty()) throw DomainError("exactly one of --mean or --mean-values is required");
  const Matrix sigma = a.sigma_file.empty() ? inline_matrix(a.sigma_values, 0, 0) : parse_matrix(read_file(a.sigma_file));
  const Matrix mean = a.mean_file.empty() ? inline_matrix(a.mean_values, a.rows, a.cols) : parse_matrix(read_file(a.mean_file));
  emit(c, params_to_json(canonicalize(sigma, mean)), out);
  return kExitOk;
}

// ---- hgm -------------------------------------------------------------------

struct HgmArgs {
  std::string ode_file;
  std::string job_file;
  std::string ref_csv;
  std::string ref_column = "value";
  int digits = 17;
};

mpq_class json_rational(const nlohmann::json& v, const char* field) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return parse_rational(v.dump());
  throw ParseError(std::string("job file: '") + field + "' entries must be rational or decimal strings");
}

std::vector<mpq_class> json_rationals(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) throw ParseError(std::string("job file: missing list '") + field + "'");
  std::vector<mpq_class> out;
  for (const auto& v : j[field]) out.push_back(json_rational(v, field));
  return out;
}

// Reference values taken from a table such as `eec mc` output, matched on x.
std::vector<mpq_class> refs_from_csv(const std::string& path, const std::string& column,
                                     const std::vector<mpq_class>& points) {
  const Table t = read_csv(read_file(path));
  std::size_t xi = t.columns.size(), vi = t.columns.size();
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == "x") xi = i;
    if (t.columns[i] == column) vi = i;
  }
  if (xi == t.columns.size() || vi == t.columns.size())
    throw ParseError("reference CSV needs columns 'x' and '" + column + "'");
  std::vector<mpq_class> out;
  for (const mpq_class& p : points) {
    bool found = false;
    for (const auto& row : t.rows) {
      const double x = std::stod(std::get<std::string>(row[xi]));
      if (std::abs(x - p.get_d()) <= 1e-12 * std::max(1.0, std::abs(x))) {
        out.push_back(parse_rational(std::get<std::string>(row[vi])));
        found = true;
        break;
      }
    }
    if (!found) throw ParseError("reference CSV has no row for x = " + format_double(p.get_d()));
  }
  return out;
}

int run_hgm(const Common& c, const HgmArgs& a, std::ostream& out) {
  const OdeSpec ode = parse_ode(read_file(a.ode_file));
  nlohmann::json job;
  try {
    job = nlohmann::json::parse(read_file(a.job_file));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("job file: ") + e.what());
  }
  if (!job.is_object()) throw ParseError("job file: expected an object");
  const std::vector<mpq_class> centers = json_rationals(job, "centers");
  const std::vector<mpq_class> points = json_rationals(job, "ref_points");
  const std::vector<mpq_class> values =
      a.ref_csv.empty() ? json_rationals(job, "ref_values") : refs_from_csv(a.ref_csv, a.ref_column, points);
  const std::size_t n_terms = job.value("n_terms", 2000);
  const auto bits = static_cast<mpfr_prec_t>(job.value("precision_bits", 256));
  if (!job.contains("eval_grid") || !job["eval_grid"].is_object())
    throw ParseError("job file: missing object 'eval_grid'");
  const auto& g = job["eval_grid"];
  for (const char* key : {"start", "stop", "step"})
    if (!g.contains(key)) throw ParseError(std::string("job file: eval_grid needs '") + key + "'");
  const mpq_class start = json_rational(g["start"], "eval_grid"), stop = json_rational(g["stop"], "eval_grid"),
                  step = json_rational(g["step"], "eval_grid");
  if (step <= 0 || stop < start) throw DomainError("eval_grid needs step > 0 and stop >= start");

  const ExtrapolationModel model = fit_extrapolation(ode, centers, n_terms, points, values, bits, c.workers);
  Table t{{"x", "value", "last_term_indicator", "divergent"}, {}};
  for (mpq_class x = start; x <= stop; x += step) {
    const SeriesValue v = model.evaluate(BigFloat(x, model.precision_bits), model.precision_bits);
    t.rows.push_back({x.get_d(), v.value.to_string(a.digits), v.last_term.to_string(a.digits),
                      is_divergent(v, model.precision_bits)});
  }
  emit_table(c, t, out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected Euler characteristic approximations for Wishart largest-eigenvalue tails", "eec"};
  app.require_subcommand(1);
  Common common;

  CentralArgs central_args;
  auto* central = app.add_subcommand("central", "Closed form for the central case with covariance I/s");
  central->add_option("--m", central_args.m, "Rows")->required();
  central->add_option("--n", central_args.n, "Columns")->required();
  central->add_option("--s", central_args.s, "Precision scale");
  central->add_option("--exponent-mode", central_args.exponent, "Envelope exponent for delta_asymptote")
      ->check(CLI::IsMember({"literal", "symmetric"}));
  add_output_options(central, common);
  add_grid_options(central, common);

  Nc2Args nc2_args;
  auto* nc2 = app.add_subcommand("nc2", "Quadrature for the non-central 2x2 case");
  nc2->add_option("--s1", nc2_args.p.s1, "Inverse variance of row 1");
  nc2->add_option("--s2", nc2_args.p.s2, "Inverse variance of row 2");
  nc2->add_option("--m11", nc2_args.p.m11, "Mean entry (1,1)");
  nc2->add_option("--m21", nc2_args.p.m21, "Mean entry (2,1)");
  nc2->add_option("--m22", nc2_args.p.m22, "Mean entry (2,2)");
  nc2->add_option("--tol", nc2_args.q.tol, "Absolute tolerance");
  nc2->add_option("--n-angle", nc2_args.q.n_angle, "Initial angle grid order");
  nc2->add_option("--n-sigma", nc2_args.q.n_sigma, "Initial sigma Gauss-Legendre order");
  nc2->add_option("--n-b", nc2_args.q.n_b, "Initial b Gauss-Legendre order");
  nc2->add_option("--max-order", nc2_args.q.max_order, "Largest order per axis");
  nc2->add_option("--sigma-max", nc2_args.sigma_max, "Truncation radius for sigma");
  nc2->add_option("--b-max", nc2_args.b_max, "Truncation radius for b");
  nc2->add_flag("--rational", nc2_args.rational, "Use the rational angle parametrization");
  add_output_options(nc2, common);
  add_grid_options(nc2, common);
  add_parallel_options(nc2, common);

  McArgs mc_args;
  auto* mc = app.add_subcommand("mc", "Monte Carlo tail probabilities, alternating sum or eigenvalue ratio");
  add_param_options(mc, mc_args.params);
  mc->add_option("--mode", mc_args.mode, "Estimator")->check(CLI::IsMember({"tails", "euler", "ratio"}));
  mc->add_option("--samples", mc_args.samples, "Number of samples");
  mc->add_option("--chunk-size", mc_args.chunk_size, "Samples per random stream");
  add_output_options(mc, common);
  add_grid_options(mc, common);
  add_parallel_options(mc, common);

  CanonArgs canon_args;
  auto* canon = app.add_subcommand("canon", "Reduce (Sigma, M) to canonical parameters");
  canon->add_option("--sigma", canon_args.sigma_file, "Covariance matrix file");
  canon->add_option("--sigma-values", canon_args.sigma_values, "Row-major covariance entries");
  canon->add_option("--mean", canon_args.mean_file, "Mean matrix file");
  canon->add_option("--mean-values", canon_args.mean_values, "Row-major mean entries (with --rows/--cols)");
  canon->add_option("--rows", canon_args.rows, "Rows of --mean-values");
  canon->add_option("--cols", canon_args.cols, "Columns of --mean-values");
  canon->add_option("--out", common.out, "Output path (default: stdout)");

  HgmArgs hgm_args;
  auto* hgm = app.add_subcommand("hgm", "Series extrapolation of an ODE solution from reference values");
  hgm->add_option("--ode", hgm_args.ode_file, "ODE file")->required();
  hgm->add_option("--job", hgm_args.job_file, "Extrapolation job file")->required();
  hgm->add_option("--ref-csv", hgm_args.ref_csv, "Take reference values from this CSV, matched on x");
  hgm->add_option("--ref-column", hgm_args.ref_column, "Value column of --ref-csv");
  hgm->add_option("--digits", hgm_args.digits, "Significant digits of value columns")->check(CLI::Range(1, 2000));
  add_output_options(hgm, common);
  hgm->add_option("--workers", common.workers, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "eec: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (central->parsed()) return run_central(common, central_args, out);
    if (nc2->parsed()) return run_nc2(common, nc2_args, out, err);
    if (mc->parsed()) return run_mc(common, mc_args, out);
    if (canon->parsed()) return run_canon(common, canon_args, out);
    if (hgm->parsed()) return run_hgm(common, hgm_args, out);
  } catch (const IoError& e) {
    err << "eec: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "eec: " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError& e) {
    err << "eec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "eec: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const SingularSystemError& e) {
    err << "eec: " << e.what() << "\n";
    return kExitNoConvergence;
  }
  return kExitUsage;
}

}  // namespace eec
