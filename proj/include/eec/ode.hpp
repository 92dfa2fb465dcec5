#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eec/bigfloat.hpp"

namespace eec {

/// sum_{k=0}^{r} c_k(z) f^{(k)}(z) = 0 with polynomial c_k (ascending degree).
struct OdeSpec {
  int rank = 0;
  std::vector<std::vector<mpq_class>> coeffs;  // rank + 1 polynomials
  std::string var = "x";

  /// Throws DomainError unless there are rank + 1 polynomials and c_r is nonzero.
  void validate() const;
  /// Exact value of c_k at z.
  mpq_class coefficient_at(int k, const mpq_class& z) const;
};

/// Reads {"rank": r, "coeffs": [["p/q", ...], ...], "var": "x"}.
OdeSpec parse_ode(std::string_view text);

/// Truncated Taylor series sum_{k=0}^{N} a_k (z - center)^k solving the ODE.
struct SeriesSolution {
  mpq_class center;
  std::vector<mpq_class> coefficients;  // a_0 .. a_N
  std::shared_ptr<const OdeSpec> ode;

  std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
};

/// Default cap on the total GMP limb count held by one series.
inline constexpr std::size_t kDefaultLimbBudget = 100'000'000;

/// Exact series with a_0..a_{r-1} = init (Taylor coefficients at center) and
/// a_r..a_N from the recurrence. Throws DomainError at a singular center or
/// when the limb budget is exceeded.
SeriesSolution series_solution(const OdeSpec& ode, const mpq_class& center, std::span<const mpq_class> init,
                               std::size_t n_terms, std::size_t limb_budget = kDefaultLimbBudget);

/// Taylor coefficients 0..N-r at the center of the ODE applied to the truncated series.
std::vector<mpq_class> residual_coefficients(const SeriesSolution& sol);

struct SeriesValue {
  BigFloat value;
  BigFloat last_term;  // |a_N (x - center)^N|
};

/// Horner evaluation at `bits` of precision.
SeriesValue evaluate_series(const SeriesSolution& sol, const BigFloat& x, mpfr_prec_t bits);

/// True when the last retained term exceeds 2^{-bits/2} max(1, |value|).
bool is_divergent(const SeriesValue& v, mpfr_prec_t bits);

/// Cauchy-Hadamard estimate 1 / sup |a_k|^{1/k} over the last N/4 coefficients;
/// infinity when those coefficients are all zero. Requires N >= 100.
double radius_estimate(const SeriesSolution& sol);

/// Fitted combination sum_i t_i f_i of series at centers c_i with init e_i.
struct ExtrapolationModel {
  std::vector<SeriesSolution> basis;
  std::vector<mpq_class> t;
  std::vector<mpq_class> ref_points;
  std::vector<mpq_class> ref_values;
  mpfr_prec_t precision_bits = 256;  // precision at which the system was snapped
  double residual = 0.0;             // max_j |sum_i t_i f_i(p_j) - b_j| / max(1, |b_j|)
  double condition = 0.0;            // max_{i,j} |t_i f_i(p_j)| / |b_j|

  SeriesValue evaluate(const BigFloat& x, mpfr_prec_t bits) const;
  /// Coefficients of sum_i t_i f_i when every basis series shares one center.
  std::vector<mpq_class> combined_coefficients() const;
};

/// Fits t from b_j = sum_i t_i f_i(p_j) by exact elimination on the system
/// snapped to rationals at `precision_bits`, doubling the precision up to
/// 4096 bits while the residual exceeds 2^{-bits/2}. Throws
/// SingularSystemError for a singular system and DomainError when a
/// reference point lies outside a series' practical range.
ExtrapolationModel fit_extrapolation(const OdeSpec& ode, std::span<const mpq_class> centers, std::size_t n_terms,
                                     std::span<const mpq_class> ref_points, std::span<const mpq_class> ref_values,
                                     mpfr_prec_t precision_bits, unsigned workers = 0);

}  // namespace eec
