#pragma once

namespace eec {

/// Central Wishart with scalar covariance I_m / s.
struct CentralSpec {
  int m = 2;
  int n = 2;
  double s = 1.0;

  void validate() const;
};

/// Expected Euler characteristic of the excursion set at threshold x on the
/// singular-value scale, via termwise reduction of the 1F1 integrand to
/// Gaussian tail integrals (no quadrature).
double expected_euler_central(const CentralSpec& spec, double x);

/// m = n = 3 specialization: 2 sqrt(2/pi) sqrt(s) (u0 - 2 s u1 + s^2/2 u2).
double expected_euler_central_m3n3(double s, double x);

/// Leading large-x term of the closed form,
/// sqrt(pi) / (2^{(m+n-3)/2} Gamma(m/2) Gamma(n/2)) y^{m+n-3} e^{-y^2/2} with y = sqrt(s) x.
double tail_asymptotic_leading(const CentralSpec& spec, double x);

enum class ExponentMode {
  Literal,    // x^{2(m+m-5)}
  Symmetric,  // x^{2(m+n-5)}
};

/// Large-x envelope of E[chi] - Pr(lambda_1 >= x^2):
/// -y^{p} e^{-y^2} / (Gamma(m-1) Gamma(n-1)), y = sqrt(s) x. Always <= 0.
double approximation_error_asymptotic(const CentralSpec& spec, double x,
                                      ExponentMode mode = ExponentMode::Symmetric);

}  // namespace eec
