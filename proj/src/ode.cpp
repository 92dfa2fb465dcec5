#include "eec/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include "json.hpp"
#include <thread>

#include "eec/errors.hpp"

namespace eec {
namespace {

constexpr mpfr_prec_t kMaxFitBits = 4096;

// c_k(center + t) = sum_d gamma[k][d] t^d
std::vector<std::vector<mpq_class>> shifted_coefficients(const OdeSpec& ode, const mpq_class& center) {
  std::vector<std::vector<mpq_class>> gamma(ode.coeffs.size());
  for (std::size_t k = 0; k < ode.coeffs.size(); ++k) {
    const auto& c = ode.coeffs[k];
    std::vector<mpq_class>& g = gamma[k];
    g = c;
    // Repeated synthetic division by (z - center) yields the Taylor coefficients.
    for (std::size_t d = 0; d + 1 < g.size(); ++d)
      for (std::size_t e = g.size() - 1; e > d; --e) g[e - 1] += center * g[e];
    while (g.size() > 1 && g.back() == 0) g.pop_back();
  }
  return gamma;
}

// j (j-1) ... (j-k+1)
mpz_class falling(std::size_t j, int k) {
  mpz_class r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<unsigned long>(j - static_cast<std::size_t>(i));
  return r;
}

// Taylor coefficient of t^n in sum_k c_k(center + t) f^{(k)}, skipping the a_{n+r} term if asked.
mpq_class residual_term(const std::vector<std::vector<mpq_class>>& gamma, const std::vector<mpq_class>& a,
                        std::size_t n, int rank, bool skip_leading) {
  mpq_class sum = 0;
  for (int k = 0; k <= rank; ++k) {
    const auto& g = gamma[static_cast<std::size_t>(k)];
    for (std::size_t d = 0; d < g.size() && d <= n; ++d) {
      if (g[d] == 0) continue;
      if (skip_leading && k == rank && d == 0) continue;
      const std::size_t j = n - d + static_cast<std::size_t>(k);
      if (j >= a.size() || a[j] == 0) continue;
      sum += g[d] * a[j] * mpq_class(falling(j, k));
    }
  }
  return sum;
}

std::size_t limbs(const mpq_class& q) {
  return mpz_size(q.get_num_mpz_t()) + mpz_size(q.get_den_mpz_t());
}

double log_abs(const mpq_class& q) {
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log(std::abs(mn)) - std::log(md) + static_cast<double>(en - ed) * std::numbers::ln2;
}

std::vector<mpq_class> solve_exact(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b) {
  const std::size_t r = b.size();
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t piv = col;
    while (piv < r && a[piv][col] == 0) ++piv;
    if (piv == r) throw SingularSystemError("fit_extrapolation: singular reference system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t row = col + 1; row < r; ++row) {
      if (a[row][col] == 0) continue;
      const mpq_class f = a[row][col] / a[col][col];
      for (std::size_t c = col; c < r; ++c) a[row][c] -= f * a[col][c];
      b[row] -= f * b[col];
    }
  }
  std::vector<mpq_class> t(r);
  for (std::size_t i = r; i-- > 0;) {
    mpq_class s = b[i];
    for (std::size_t c = i + 1; c < r; ++c) s -= a[i][c] * t[c];
    t[i] = s / a[i][i];
  }
  return t;
}

}  // namespace

void OdeSpec::validate() const {
  if (rank < 1) throw DomainError("OdeSpec: rank must be positive");
  if (coeffs.size() != static_cast<std::size_t>(rank) + 1)
    throw DomainError("OdeSpec: expected rank + 1 coefficient polynomials");
  const auto& top = coeffs.back();
  if (std::all_of(top.begin(), top.end(), [](const mpq_class& q) { return q == 0; }))
    throw DomainError("OdeSpec: leading coefficient is identically zero");
}

mpq_class OdeSpec::coefficient_at(int k, const mpq_class& z) const {
  const auto& c = coeffs.at(static_cast<std::size_t>(k));
  mpq_class acc = 0;
  for (std::size_t e = c.size(); e-- > 0;) acc = acc * z + c[e];
  return acc;
}

OdeSpec parse_ode(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ODE file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("rank") || !j.contains("coeffs"))
    throw ParseError("ODE file: fields 'rank' and 'coeffs' are required");
  if (!j["rank"].is_number_integer()) throw ParseError("ODE file: 'rank' must be an integer");
  if (!j["coeffs"].is_array()) throw ParseError("ODE file: 'coeffs' must be a list of lists");
  OdeSpec ode;
  ode.rank = j["rank"].get<int>();
  for (const auto& poly : j["coeffs"]) {
    if (!poly.is_array()) throw ParseError("ODE file: each coefficient must be a list");
    std::vector<mpq_class> c;
    for (const auto& v : poly) {
      if (v.is_string())
        c.push_back(parse_rational(v.get<std::string>()));
      else if (v.is_number_integer())
        c.push_back(parse_rational(v.dump()));
      else
        throw ParseError("ODE file: coefficients must be rational strings or integers");
    }
    ode.coeffs.push_back(std::move(c));
  }
  if (j.contains("var")) {
    if (!j["var"].is_string()) throw ParseError("ODE file: 'var' must be a string");
    ode.var = j["var"].get<std::string>();
  }
  ode.validate();
  return ode;
}

SeriesSolution series_solution(const OdeSpec& ode, const mpq_class& center, std::span<const mpq_class> init,
                               std::size_t n_terms, std::size_t limb_budget) {
  ode.validate();
  const auto r = static_cast<std::size_t>(ode.rank);
  if (init.size() != r) throw DomainError("series_solution: need exactly rank initial values");
  if (n_terms < r) throw DomainError("series_solution: n_terms must be at least the rank");
  const auto gamma = shifted_coefficients(ode, center);
  const mpq_class lead = gamma[r][0];
  if (lead == 0) throw DomainError("series_solution: center is a singular point");

  SeriesSolution sol;
  sol.center = center;
  sol.ode = std::make_shared<const OdeSpec>(ode);
  sol.coefficients.reserve(n_terms + 1);
  std::size_t used = 0;
  for (const auto& v : init) {
    sol.coefficients.push_back(v);
    used += limbs(v);
  }
  for (std::size_t n = 0; n + r <= n_terms; ++n) {
    // Unknown a_{n+r} is appended as zero so residual_term can index it.
    sol.coefficients.emplace_back(0);
    const mpq_class rest = residual_term(gamma, sol.coefficients, n, ode.rank, true);
    mpq_class next = -rest / (lead * mpq_class(falling(n + r, ode.rank)));
    used += limbs(next);
    if (used > limb_budget) throw DomainError("series_solution: memory budget exceeded");
    sol.coefficients.back() = std::move(next);
  }
  return sol;
}

std::vector<mpq_class> residual_coefficients(const SeriesSolution& sol) {
  const OdeSpec& ode = *sol.ode;
  const auto r = static_cast<std::size_t>(ode.rank);
  const auto gamma = shifted_coefficients(ode, sol.center);
  std::vector<mpq_class> out;
  for (std::size_t n = 0; n + r <= sol.degree(); ++n) out.push_back(residual_term(gamma, sol.coefficients, n, ode.rank, false));
  return out;
}

SeriesValue evaluate_series(const SeriesSolution& sol, const BigFloat& x, mpfr_prec_t bits) {
  BigFloat t(bits);
  mpfr_sub_q(t.get(), x.get(), sol.center.get_mpq_t(), MPFR_RNDN);
  BigFloat acc(bits);
  const auto& a = sol.coefficients;
  for (std::size_t k = a.size(); k-- > 0;) {
    mpfr_mul(acc.get(), acc.get(), t.get(), MPFR_RNDN);
    mpfr_add_q(acc.get(), acc.get(), a[k].get_mpq_t(), MPFR_RNDN);
  }
  BigFloat last(bits);
  if (!a.empty()) {
    mpfr_abs(t.get(), t.get(), MPFR_RNDN);
    mpfr_pow_ui(last.get(), t.get(), static_cast<unsigned long>(sol.degree()), MPFR_RNDN);
    BigFloat lead(abs(a.back()), bits);
    mpfr_mul(last.get(), last.get(), lead.get(), MPFR_RNDN);
  }
  return {std::move(acc), std::move(last)};
}

bool is_divergent(const SeriesValue& v, mpfr_prec_t bits) {
  BigFloat scale = v.value.abs();
  if (mpfr_cmp_ui(scale.get(), 1) < 0) mpfr_set_ui(scale.get(), 1, MPFR_RNDN);
  mpfr_mul_2si(scale.get(), scale.get(), -static_cast<long>(bits / 2), MPFR_RNDN);
  return !mpfr_number_p(v.last_term.get()) || v.last_term > scale;
}

double radius_estimate(const SeriesSolution& sol) {
  const std::size_t n = sol.degree();
  if (n < 100) throw DomainError("radius_estimate: needs at least 100 terms");
  double best = -std::numeric_limits<double>::infinity();  // sup of log|a_k| / k
  for (std::size_t k = n - n / 4; k <= n; ++k) {
    if (sol.coefficients[k] == 0) continue;
    best = std::max(best, log_abs(sol.coefficients[k]) / static_cast<double>(k));
  }
  if (best == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  return std::exp(-best);
}

SeriesValue ExtrapolationModel::evaluate(const BigFloat& x, mpfr_prec_t bits) const {
  BigFloat value(bits), last(bits);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const SeriesValue f = evaluate_series(basis[i], x, bits);
    const BigFloat ti(t[i], bits);
    value = value + ti * f.value;
    const BigFloat contrib = ti.abs() * f.last_term;
    if (contrib > last) last = contrib;
  }
  return {std::move(value), std::move(last)};
}

std::vector<mpq_class> ExtrapolationModel::combined_coefficients() const {
  std::size_t len = 0;
  for (const auto& f : basis) {
    if (f.center != basis.front().center) throw DomainError("combined_coefficients: basis centers differ");
    len = std::max(len, f.coefficients.size());
  }
  std::vector<mpq_class> out(len, 0);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t k = 0; k < basis[i].coefficients.size(); ++k) out[k] += t[i] * basis[i].coefficients[k];
  return out;
}

ExtrapolationModel fit_extrapolation(const OdeSpec& ode, std::span<const mpq_class> centers, std::size_t n_terms,
                                     std::span<const mpq_class> ref_points, std::span<const mpq_class> ref_values,
                                     mpfr_prec_t precision_bits, unsigned workers) {
  ode.validate();
  const auto r = static_cast<std::size_t>(ode.rank);
  if (centers.size() != r || ref_points.size() != r || ref_values.size() != r)
    throw DomainError("fit_extrapolation: centers, ref_points and ref_values must each have rank entries");
  if (precision_bits < 32 || precision_bits > kMaxFitBits)
    throw DomainError("fit_extrapolation: precision_bits must be in [32, 4096]");

  ExtrapolationModel model;
  model.basis.resize(r);
  model.ref_points.assign(ref_points.begin(), ref_points.end());
  model.ref_values.assign(ref_values.begin(), ref_values.end());

  auto build = [&](std::size_t i) {
    std::vector<mpq_class> init(r, 0);
    init[i] = 1;
    model.basis[i] = series_solution(ode, centers[i], init, n_terms);
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || r == 1) {
    for (std::size_t i = 0; i < r; ++i) build(i);
  } else {
    std::vector<std::exception_ptr> errors(r);
    {
      std::vector<std::jthread> pool;
      for (std::size_t i = 0; i < r; ++i)
        pool.emplace_back([&, i] {
          try {
            build(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  double b_scale = 0.0;
  for (const auto& b : ref_values) b_scale = std::max(b_scale, std::abs(b.get_d()));

  for (mpfr_prec_t bits = precision_bits;; bits *= 2) {
    std::vector<std::vector<mpq_class>> a(r, std::vector<mpq_class>(r));
    for (std::size_t j = 0; j < r; ++j) {
      const BigFloat p(ref_points[j], bits);
      for (std::size_t i = 0; i < r; ++i) {
        SeriesValue v = evaluate_series(model.basis[i], p, bits);
        if (is_divergent(v, bits))
          throw DomainError("fit_extrapolation: reference point outside the series' practical range");
        a[j][i] = v.value.to_rational();
      }
    }
    model.t = solve_exact(a, model.ref_values);

    // Residual against the basis evaluated at higher precision than the snapped system.
    const mpfr_prec_t check_bits = bits + 64;
    double residual = 0.0, condition = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      const BigFloat p(ref_points[j], check_bits);
      BigFloat sum(check_bits);
      for (std::size_t i = 0; i < r; ++i) {
        const BigFloat term = BigFloat(model.t[i], check_bits) * evaluate_series(model.basis[i], p, check_bits).value;
        sum = sum + term;
        if (b_scale > 0.0) condition = std::max(condition, term.abs().to_double() / b_scale);
      }
      const BigFloat diff = (sum - BigFloat(model.ref_values[j], check_bits)).abs();
      residual = std::max(residual, diff.to_double() / std::max(1.0, std::abs(model.ref_values[j].get_d())));
    }
    model.residual = residual;
    model.condition = condition;
    model.precision_bits = bits;
    if (residual <= std::ldexp(1.0, -static_cast<int>(bits / 2))) return model;
    if (bits * 2 > kMaxFitBits)
      throw SingularSystemError("fit_extrapolation: system is numerically singular up to 4096 bits");
  }
}

}  // namespace eec
