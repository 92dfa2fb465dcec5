#pragma once

#include <optional>

namespace eec {

/// m = n = 2 canonical parameters: Sigma = diag(1/s1, 1/s2),
/// M = [[m11, 0], [m21, m22]] with m11, m22 >= 0.
struct Params2x2 {
  double s1 = 1.0;
  double s2 = 1.0;
  double m11 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;

  void validate() const;
};

struct QuadratureSpec {
  double tol = 1e-6;  // absolute
  int n_angle = 32;
  int n_sigma = 32;
  int n_b = 32;
  int max_order = 1024;  // per-axis cap before declaring non-convergence
  std::optional<double> sigma_max;
  std::optional<double> b_max;
  unsigned workers = 0;  // 0: hardware concurrency

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // refinement delta plus truncation bound
  bool converged = false;
  int n_angle = 0;
  int n_sigma = 0;
  int n_b = 0;
  double sigma_max = 0.0;
  double b_max = 0.0;
};

/// Quadratic form R = tr((A - M)^T Sigma^{-1} (A - M)) for A = sigma g h^T + b G H^T.
double integrand_R(double sigma, double b, double theta, double phi, const Params2x2& p);

/// chi(M_x) for a 2x2 matrix with critical values sigma (at P) and b (at Q).
int euler_char_exact_2x2(double sigma, double b, double x);

/// Full integrand of the four-dimensional Euler characteristic integral
/// (1/2) (sigma^2 - b^2) s1 s2 / (2 pi)^2 exp(-R/2) in (sigma, b, theta, phi).
double integrand_angular(double sigma, double b, double theta, double phi, const Params2x2& p);

/// Same integrand after sin = 2u/(1+u^2), cos = (1-u^2)/(1+u^2) in both angles:
/// s1 s2 (sigma^2 - b^2) / (2 pi^2 (1+u^2)(1+t^2)) exp(-R/2).
double integrand_rational(double sigma, double b, double u, double t, const Params2x2& p);

/// E[chi(M_x)] by trapezoidal angles and Gauss-Legendre radial rules with
/// refinement until the estimated error is below q.tol.
QuadratureResult expected_euler_2x2(const Params2x2& p, double x, const QuadratureSpec& q = {});

/// Same integral evaluated over (u, t) in R^2 from the rational parametrization.
QuadratureResult expected_euler_2x2_rational(const Params2x2& p, double x, const QuadratureSpec& q = {});

/// Radius rho with discarded mass outside {sigma^2 + b^2 <= rho^2} at most `mass`,
/// from R >= s_min (||A||_F - ||M||_F)^2 and ||A||_F^2 = sigma^2 + b^2.
double truncation_radius(const Params2x2& p, double mass);

/// The envelope bound on |integrand| mass outside radius rho:
/// pi s1 s2 int_rho^inf r^3 exp(-s_min (r - ||M||_F)^2 / 2) dr.
double truncation_mass_bound(const Params2x2& p, double rho);

/// b-domain restriction used to check the cancellation of the b > x part.
enum class BRegion {
  Full,        // -b_max <= b <= b_max
  BelowSigma,  // x <= b <= sigma
  AboveSigma,  // sigma <= b <= b_max
};

/// One fixed-order evaluation (no refinement) over a restricted b-domain.
double expected_euler_2x2_region(const Params2x2& p, double x, BRegion region, int n_angle, int n_sigma,
                                 int n_b, double radius, unsigned workers = 0);

}  // namespace eec
