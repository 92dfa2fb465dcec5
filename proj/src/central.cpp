#include "eec/central.hpp"

#include <cmath>
#include <numbers>

#include "eec/errors.hpp"
#include "eec/special.hpp"
#include "eec/summation.hpp"

namespace eec {

void CentralSpec::validate() const {
  if (m < 2 || n < m) throw DomainError("CentralSpec: requires n >= m >= 2");
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("CentralSpec: s must be positive");
}

double expected_euler_central(const CentralSpec& spec, double x) {
  spec.validate();
  if (!(x >= 0.0)) throw DomainError("expected_euler_central: x must be nonnegative");
  const EulerConstants c = euler_constants(spec.m, spec.n, spec.s);
  const auto a = hyp1f1_terminating_coefficients(spec.m, spec.n);
  // sigma^{n-m} (s sigma^2)^j = s^j sigma^{2k} with k = (n-m)/2 + j.
  CompensatedSum sum;
  double sj = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double k = 0.5 * (spec.n - spec.m) + static_cast<double>(j);
    sum.add(a[j] * sj * gaussian_tail_u(spec.s, k, x));
    sj *= spec.s;
  }
  return c.product * sum.value();
}

double expected_euler_central_m3n3(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("expected_euler_central_m3n3: s must be positive");
  if (!(x >= 0.0)) throw DomainError("expected_euler_central_m3n3: x must be nonnegative");
  const double scale = 2.0 * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(s);
  CompensatedSum sum;
  sum.add(gaussian_tail_u(s, 0.0, x));
  sum.add(-2.0 * s * gaussian_tail_u(s, 1.0, x));
  sum.add(0.5 * s * s * gaussian_tail_u(s, 2.0, x));
  return scale * sum.value();
}

double tail_asymptotic_leading(const CentralSpec& spec, double x) {
  spec.validate();
  const double y = std::sqrt(spec.s) * x;
  const double m = spec.m;
  const double n = spec.n;
  // 2^{(m+n-3)/2}: the leading coefficient of the closed form itself.
  const double log_coeff = 0.5 * std::log(std::numbers::pi) - 0.5 * (m + n - 3.0) * std::numbers::ln2 -
                           log_gamma(0.5 * m) - log_gamma(0.5 * n);
  return std::exp(log_coeff + (m + n - 3.0) * std::log(y) - 0.5 * y * y);
}

double approximation_error_asymptotic(const CentralSpec& spec, double x, ExponentMode mode) {
  spec.validate();
  const double y = std::sqrt(spec.s) * x;
  const double power = mode == ExponentMode::Literal ? 2.0 * (2.0 * spec.m - 5.0)
                                                     : 2.0 * (spec.m + spec.n - 5.0);
  const double log_mag = power * std::log(y) - y * y - log_gamma(spec.m - 1.0) - log_gamma(spec.n - 1.0);
  return -std::exp(log_mag);
}

}  // namespace eec
