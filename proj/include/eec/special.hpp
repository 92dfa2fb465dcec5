#pragma once

#include <vector>

namespace eec {

double log_gamma(double x);

/// Regularized upper incomplete gamma Q(shape, x).
double upper_gamma_regularized(double shape, double x);

/// u(s, k, x) = int_x^inf exp(-s t^2 / 2) t^{2k} dt; k may be half-integer.
double gaussian_tail_u(double s, double k, double x);

/// Coefficients a_j of 1F1(-(m-1); 1+n-m; z) = sum_j a_j z^j, j = 0..m-1.
std::vector<double> hyp1f1_terminating_coefficients(int m, int n);

/// Terminating confluent hypergeometric polynomial 1F1(-(m-1); 1+n-m; z).
double hyp1f1_terminating(int m, int n, double z);

/// Constant factors c1..c5 of the central scalar-covariance closed form.
///
/// c5 carries (-1)^{m-1}, so `product` has sign (-1)^{m-1}; at m = n = 3 the
/// product is 2 sqrt(2/pi) sqrt(s). For even m the 1F1 integral is negative
/// past the bulk, which keeps the expected Euler characteristic positive.
/// Individual factors can under/overflow for large m, n; `log_abs_product`
/// and `sign` are always finite.
struct EulerConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double product = 0.0;
  double log_abs_product = 0.0;
  int sign = 1;
};

EulerConstants euler_constants(int m, int n, double s);

/// Central chi-square survival function, Q(df/2, x/2).
double chisq_sf(int df, double x);

/// Non-central chi-square survival function as a Poisson mixture of central tails.
double noncentral_chisq_sf(int df, double ncp, double x);

/// Order-of-magnitude tail envelope of chi^2(df; b^2):
/// x^{(df-2)/2} e^{-x/2} for b = 0, else x^{(df-3)/4} e^{-x/2 + b sqrt(x)}.
double chisq_tail_asymptotic(int df, double b, double x);

}  // namespace eec
