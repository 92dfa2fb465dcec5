// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: eec_acceptance [--criterion N]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eec/central.hpp"
#include "eec/cli.hpp"
#include "eec/io.hpp"
#include "eec/montecarlo.hpp"
#include "eec/noncentral2x2.hpp"
#include "eec/ode.hpp"
#include "eec/special.hpp"
#include "ode_fixtures.hpp"

using namespace eec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "  FAILED: " << what << "\n";
    }
  }
  void note(const std::string& what) { detail << "  " << what << "\n"; }
};

std::string fmt(double v) { return format_double(v); }

Table run_table(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"eec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) throw std::runtime_error("eec exited with " + std::to_string(code) + ": " + err.str());
  return read_csv(out.str());
}

double column(const Table& t, std::size_t row, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return std::stod(std::get<std::string>(t.rows[row][i]));
  throw std::runtime_error("missing column " + name);
}

const Params2x2 kTable{2.0, 1.0, 1.0, -1.0, 1.0};

WishartParams table_params() {
  WishartParams p;
  p.m = 2;
  p.n = 2;
  p.scales = {2.0, 1.0};
  p.mean = Matrix{{1.0, 0.0}, {-1.0, 1.0}};
  return p;
}

// 1. Central closed form against tabulated values.
void criterion1(Outcome& o) {
  const double ref[] = {0.215428520, 0.016122970, 0.000357368};
  const auto t0 = Clock::now();
  const Table t = run_table({"central", "--m", "3", "--n", "3", "--s", "1", "--x", "3,4,5"});
  const double elapsed = seconds_since(t0);
  for (std::size_t k = 0; k < 3; ++k) {
    const double v = column(t, k, "value");
    const double err = std::abs(v - ref[k]);
    o.note("x=" + fmt(column(t, k, "x")) + " value=" + fmt(v) + " ref=" + fmt(ref[k]) + " abs_err=" + fmt(err));
    o.require(err <= 1e-8, "x=" + fmt(column(t, k, "x")) + " absolute error " + fmt(err) + " > 1e-8");
  }
  o.note("runtime " + fmt(elapsed) + " s");
  o.require(elapsed < 0.1, "runtime >= 0.1 s");
}

// 2. Non-central 2x2 quadrature against tabulated values.
void criterion2(Outcome& o) {
  const double ref[] = {0.745835, 0.567729, 0.144879, 0.0146728, 0.000582526, 8.79942e-6};
  const auto t0 = Clock::now();
  const Table t = run_table({"nc2", "--s1", "2", "--s2", "1", "--m11", "1", "--m21", "-1", "--m22", "1", "--x",
                             "1,2,3,4,5,6"});
  const double elapsed = seconds_since(t0);
  for (std::size_t k = 0; k < 6; ++k) {
    const double v = column(t, k, "value");
    const double err = std::abs(v - ref[k]);
    o.note("x=" + fmt(column(t, k, "x")) + " value=" + fmt(v) + " ref=" + fmt(ref[k]) + " rel_err=" + fmt(err / ref[k]));
    o.require(err <= std::max(1e-3 * ref[k], 1e-8), "x=" + fmt(column(t, k, "x")) + " outside relative 1e-3");
  }
  o.note("runtime " + fmt(elapsed) + " s");
  o.require(elapsed <= 60.0, "runtime > 60 s");
}

// 3. Table 1 consistency: quadrature at x = 0 and the Monte Carlo Pr(sigma > x) row.
void criterion3(Outcome& o) {
  const auto t0 = Clock::now();
  const Table q = run_table({"nc2", "--s1", "2", "--s2", "1", "--m11", "1", "--m21", "-1", "--m22", "1", "--x", "0"});
  const double v0 = column(q, 0, "value");
  o.note("quadrature x=0 value=" + fmt(v0));
  o.require(std::abs(v0) <= 1e-6, "|value at x=0| > 1e-6");

  const double ref[] = {1.0, 0.95, 0.57, 0.14, 0.014, 0.00058};
  const std::vector<double> xs{0, 1, 2, 3, 4, 5};
  McConfig cfg;
  cfg.n_samples = 100000;
  cfg.seed = 1;
  const auto tails = estimate_eigen_tails(table_params(), xs, cfg);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const TailEstimate& e = tails[k][0];
    const double err = std::abs(e.value - ref[k]);
    // Informational: the printed row keeps two significant digits, so allow half a unit in the last digit.
    const double digit = ref[k] == 1.0 ? 0.0 : 0.5 * std::pow(10.0, std::floor(std::log10(ref[k])) - 1.0);
    o.note("x=" + fmt(xs[k]) + " mc=" + fmt(e.value) + " stderr=" + fmt(e.stderr_) + " ref=" + fmt(ref[k]) +
           " err/stderr=" + (e.stderr_ > 0 ? fmt(err / e.stderr_) : std::string("-")) +
           " within_rounding=" + (err <= digit + 3.0 * e.stderr_ ? "yes" : "no"));
    o.require(err <= 3.0 * e.stderr_, "x=" + fmt(xs[k]) + " Monte Carlo estimate not within 3 standard errors");
  }
  const double elapsed = seconds_since(t0);
  o.note("runtime " + fmt(elapsed) + " s");
  o.require(elapsed <= 30.0, "runtime > 30 s");
}

// Largest x on the descending tail where the closed form equals target.
double threshold_for(const CentralSpec& spec, double target) {
  double x = 20.0 / std::sqrt(spec.s);
  while (expected_euler_central(spec, x) < target) x -= 0.01;
  double lo = x, hi = x + 0.01;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (expected_euler_central(spec, mid) >= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// 4. Closed form, quadrature and Monte Carlo agree pairwise.
void criterion4(Outcome& o) {
  std::uint64_t seed = 100;
  for (auto [m, n] : {std::pair{2, 2}, {3, 3}, {3, 5}}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const CentralSpec spec{m, n, s};
      std::vector<double> xs;
      for (double target : {0.5, 0.1, 0.01}) xs.push_back(threshold_for(spec, target));
      std::sort(xs.begin(), xs.end());
      McConfig cfg;
      cfg.n_samples = 100000;
      cfg.seed = seed++;
      const auto mc = estimate_expected_euler(
          WishartParams::central(static_cast<std::size_t>(m), static_cast<std::size_t>(n), s), xs, cfg);
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double closed = expected_euler_central(spec, xs[k]);
        const double band = 3.0 * mc[k].stderr_;
        std::string line = "m=" + std::to_string(m) + " n=" + std::to_string(n) + " s=" + fmt(s) + " x=" + fmt(xs[k]) +
                           " closed=" + fmt(closed) + " mc=" + fmt(mc[k].value) + " stderr=" + fmt(mc[k].stderr_);
        o.require(std::abs(closed - mc[k].value) <= band, line + " closed vs mc");
        if (m == 2 && n == 2) {
          const double quad = expected_euler_2x2({s, s, 0.0, 0.0, 0.0}, xs[k]).value;
          line += " quad=" + fmt(quad);
          o.require(std::abs(quad - mc[k].value) <= band, line + " quad vs mc");
          o.require(std::abs(quad - closed) <= band, line + " quad vs closed");
        }
        o.note(line);
      }
    }
  }
}

// 5. Exact series residuals and the fitted confluent extrapolation.
void criterion5(Outcome& o) {
  const auto t0 = Clock::now();
  for (const auto& c : fixtures::exactness_suite()) {
    const SeriesSolution s = series_solution(c.ode, c.center, c.init, 300);
    const auto res = residual_coefficients(s);
    const bool zero = std::all_of(res.begin(), res.end(), [](const mpq_class& q) { return q == 0; });
    o.note(c.name + ": " + std::to_string(res.size()) + " residual orders, all exactly zero: " + (zero ? "yes" : "no"));
    o.require(zero && res.size() == 300 - static_cast<std::size_t>(c.ode.rank) + 1, c.name + " residual not exactly zero");
  }

  const std::vector<mpq_class> centers{mpq_class(1, 2), mpq_class(3, 5)};
  const std::vector<mpq_class> points{mpq_class(1, 4), mpq_class(3, 4)};
  auto poly = [](const mpq_class& z) { return mpq_class(1 - 4 * z + 2 * z * z); };
  const std::vector<mpq_class> values{poly(points[0]), poly(points[1])};
  const ExtrapolationModel model = fit_extrapolation(fixtures::confluent_m3n3(), centers, 400, points, values, 256);
  const auto a = hyp1f1_terminating_coefficients(3, 3);
  std::mt19937_64 rng(2019);
  // Points inside both discs of convergence; the equation is singular at z = 0.
  std::uniform_int_distribution<int> num(100, 900);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const mpq_class z(num(rng), 1000);
    mpq_class ref = 0, w = 1;
    for (double aj : a) {
      ref += mpq_class(aj) * w;
      w *= 2 * z;
    }
    const SeriesValue v = model.evaluate(BigFloat(z, 256), 256);
    worst = std::max(worst, std::abs((v.value - BigFloat(ref, 256)).to_double()));
  }
  o.note("fit residual " + fmt(model.residual) + ", worst 1F1 error over 20 points " + fmt(worst));
  o.require(worst <= 1e-20, "extrapolation error above 1e-20");
  const double elapsed = seconds_since(t0);
  o.note("runtime " + fmt(elapsed) + " s");
  o.require(elapsed < 5.0, "runtime >= 5 s");
}

// 6. Sine reconstruction from two reference values.
void criterion6(Outcome& o) {
  const std::vector<mpq_class> centers{0, mpq_class(1, 10)};
  const std::vector<mpq_class> points{0, parse_rational("1.5707963267948966")};
  const std::vector<mpq_class> values{0, 1};
  const ExtrapolationModel model = fit_extrapolation(fixtures::harmonic(), centers, 400, points, values, 256);
  double worst = 0.0;
  for (int k = 0; k <= 300; ++k) {
    const mpq_class x(k, 100);
    BigFloat ref(x, 256);
    mpfr_sin(ref.get(), ref.get(), MPFR_RNDN);
    worst = std::max(worst, std::abs((model.evaluate(BigFloat(x, 256), 256).value - ref).to_double()));
  }
  o.note("worst |model - sin| over x = 0, 0.01, ..., 3: " + fmt(worst));
  o.require(worst <= 1e-10, "sine reconstruction error above 1e-10");
}

// 7. Ratio Pr(lambda_2 >= x) / Pr(lambda_1 >= x) decreases.
void criterion7(Outcome& o) {
  const std::vector<double> xs{1.0, 1.5, 2.0, 2.5};
  McConfig cfg;
  cfg.n_samples = 1000000;
  cfg.seed = 7;
  const auto r = lemma1_ratio_curve(table_params(), xs, cfg);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    o.note("x=" + fmt(xs[k]) + " ratio=" + fmt(r[k].value) + " stderr=" + fmt(r[k].stderr_));
    o.require(r[k].defined, "ratio undefined at x=" + fmt(xs[k]));
    if (k > 0)
      o.require(r[k].value + 3.0 * r[k].stderr_ < r[k - 1].value - 3.0 * r[k - 1].stderr_,
                "ratio not decreasing beyond 3 standard errors at x=" + fmt(xs[k]));
  }
}

// 8. Tail asymptote brackets the closed form; the error envelope is relatively small and shrinking.
void criterion8(Outcome& o) {
  const CentralSpec spec{3, 3, 1.0};
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k <= 20; ++k) {
    const double x = 5.0 + 0.1 * k;
    const double ratio = expected_euler_central(spec, x) / tail_asymptotic_leading(spec, x);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  o.note("closed / asymptote over x in [5, 7]: min " + fmt(lo) + ", max " + fmt(hi));
  o.require(lo >= 0.8 && hi <= 1.2, "ratio outside [0.8, 1.2]");
  double prev = 1e300;
  for (double x : {6.0, 6.5, 7.0, 8.0}) {
    const double rel = std::abs(approximation_error_asymptotic(spec, x, ExponentMode::Symmetric)) /
                       expected_euler_central(spec, x);
    o.note("x=" + fmt(x) + " |delta| / closed = " + fmt(rel));
    if (x == 6.0) o.require(rel < 0.05, "|delta| / closed >= 0.05 at x = 6");
    o.require(rel < prev, "|delta| / closed not decreasing at x=" + fmt(x));
    prev = rel;
  }
}

// 9. Byte-identical output across worker counts.
void criterion9(Outcome& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "eec_acceptance";
  fs::create_directories(dir);
  const std::string params = (dir / "params.json").string();
  std::ofstream(params) << R"({"m": 3, "n": 4, "scales": [0.5, 1, 2], "mean": [[1, 0, 0, 0], [0.5, 1, 0, 0], [-1, 0.2, 2, 0]]})";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"mc_euler", "mc --params " + params + " --mode euler --x 0.5,1,2,3 --samples 200000 --seed 42"},
      {"mc_tails", "mc --params " + params + " --mode tails --x-range 0:4:0.5 --samples 200000 --seed 43"},
      {"mc_ratio", "mc --params " + params + " --mode ratio --x 1,2,3 --samples 200000 --seed 44 --chunk-size 1000"},
      {"nc2", "nc2 --s1 2 --s2 1 --m11 1 --m21 -1 --m22 1 --x 0,1,3"},
      {"nc2_rational", "nc2 --rational --s1 1.5 --s2 0.5 --m11 0.3 --m21 0.2 --m22 1 --x 2"},
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (const auto& [name, args] : commands) {
    std::string reference;
    for (int workers : {1, 2, 5}) {
      const fs::path out = dir / (name + "_w" + std::to_string(workers) + ".csv");
      const std::string cmd = std::string(EEC_CLI_PATH) + " " + args + " --workers " + std::to_string(workers) +
                              " --out " + out.string();
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0, name + " exited with status " + std::to_string(rc));
      const std::string text = slurp(out);
      if (workers == 1)
        reference = text;
      else
        o.require(!text.empty() && text == reference, name + " output differs at workers=" + std::to_string(workers));
    }
    o.note(name + ": compared workers 1, 2, 5");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"central closed form matches tabulated values", criterion1},
      {"non-central 2x2 quadrature matches tabulated values", criterion2},
      {"x = 0 quadrature and Monte Carlo Pr(sigma > x) row", criterion3},
      {"closed form, quadrature and Monte Carlo agree", criterion4},
      {"exact series residuals and 1F1 extrapolation", criterion5},
      {"sine extrapolation from two reference values", criterion6},
      {"eigenvalue ratio decays", criterion7},
      {"tail asymptotics bracketing", criterion8},
      {"determinism across worker counts", criterion9},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be between 1 and %zu\n", criteria.size());
    return 2;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "  EXCEPTION: " << e.what() << "\n";
    }
    std::printf("[%s] criterion %zu: %s\n%s", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
