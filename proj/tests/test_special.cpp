#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "eec/errors.hpp"
#include "eec/special.hpp"

using namespace eec;

TEST_CASE("log_gamma") {
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-15));
  CHECK(log_gamma(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-15));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
}

TEST_CASE("upper incomplete gamma matches boost on a grid") {
  for (double a : {0.5, 1.0, 1.5, 2.5, 3.0, 7.5, 12.0, 30.5}) {
    for (double x : {1e-6, 0.01, 0.3, 1.0, 2.0, 4.5, 9.0, 20.0, 45.0, 90.0}) {
      const double ref = boost::math::gamma_q(a, x);
      const double got = upper_gamma_regularized(a, x);
      INFO("a=" << a << " x=" << x);
      if (ref > 1e-290) CHECK(std::abs(got - ref) <= 1e-12 * ref + 1e-300);
    }
  }
  CHECK(upper_gamma_regularized(2.0, 0.0) == 1.0);
  CHECK_THROWS_AS(upper_gamma_regularized(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(upper_gamma_regularized(1.0, -1.0), DomainError);
}

TEST_CASE("gaussian tail u at zero and as a derivative") {
  CHECK(gaussian_tail_u(2.0, 0.0, 0.0) == doctest::Approx(std::sqrt(std::numbers::pi / 4.0)).epsilon(1e-14));
  // int_0^inf t^2 e^{-t^2/2} dt = sqrt(pi/2)
  CHECK(gaussian_tail_u(1.0, 1.0, 0.0) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
  for (double s : {0.5, 1.0, 3.0})
    for (double k : {0.0, 0.5, 1.0, 2.5, 4.0})
      for (double x : {0.3, 1.0, 2.2, 3.5}) {
        // Near zero the derivative x^{2k} is tiny next to u itself for large k.
        if (x < 1.0 && k > 1.0) continue;
        const double h = 1e-5;
        const double fd = (gaussian_tail_u(s, k, x + h) - gaussian_tail_u(s, k, x - h)) / (2.0 * h);
        const double exact = -std::exp(-0.5 * s * x * x) * std::pow(x, 2.0 * k);
        INFO("s=" << s << " k=" << k << " x=" << x);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));
      }
}

TEST_CASE("gaussian tail u against adaptive quadrature") {
  using boost::math::quadrature::gauss_kronrod;
  for (double s : {0.5, 2.0})
    for (double k : {0.5, 1.5, 3.0})
      for (double x : {0.0, 1.0, 3.0}) {
        auto f = [&](double t) { return std::exp(-0.5 * s * t * t) * std::pow(t, 2.0 * k); };
        const double ref = gauss_kronrod<double, 61>::integrate(f, x, std::numeric_limits<double>::infinity(), 15, 1e-14);
        CHECK(gaussian_tail_u(s, k, x) == doctest::Approx(ref).epsilon(1e-11));
      }
}

TEST_CASE("terminating 1F1 polynomial") {
  // 1F1(-2; 1; z) = 1 - 2z + z^2/2
  const auto a = hyp1f1_terminating_coefficients(3, 3);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == -2.0);
  CHECK(a[2] == 0.5);
  CHECK(hyp1f1_terminating(2, 5, 2.0) == doctest::Approx(1.0 - 2.0 / 4.0));
  CHECK_THROWS_AS(hyp1f1_terminating_coefficients(3, 2), DomainError);
}

TEST_CASE("terminating 1F1 satisfies the Kummer equation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (auto [m, n] : {std::pair{2, 2}, {3, 3}, {3, 5}, {5, 7}, {8, 8}}) {
    const auto a = hyp1f1_terminating_coefficients(m, n);
    for (int trial = 0; trial < 20; ++trial) {
      const double z = u(rng);
      double f = 0.0, f1 = 0.0, f2 = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const double dj = static_cast<double>(j);
        f += a[j] * std::pow(z, dj);
        if (j >= 1) f1 += a[j] * dj * std::pow(z, dj - 1.0);
        if (j >= 2) f2 += a[j] * dj * (dj - 1.0) * std::pow(z, dj - 2.0);
      }
      const double residual = z * f2 + (1.0 + n - m - z) * f1 + (m - 1.0) * f;
      CHECK(std::abs(residual) <= 1e-10 * (1.0 + std::pow(std::abs(z), m - 1.0)));
    }
  }
}

TEST_CASE("Euler constants at m = n = 3") {
  for (double s : {0.5, 1.0, 10.0}) {
    const EulerConstants c = euler_constants(3, 3, s);
    CHECK(c.product == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(s)).epsilon(1e-12));
    CHECK(c.sign == 1);
  }
  CHECK(euler_constants(2, 2, 1.0).sign == -1);
  const EulerConstants big = euler_constants(30, 30, 1.0);
  CHECK(std::isfinite(big.log_abs_product));
  CHECK_THROWS_AS(euler_constants(1, 2, 1.0), DomainError);
}

TEST_CASE("central chi-square survival function") {
  for (double x : {0.0, 0.7, 3.0, 12.0}) CHECK(chisq_sf(2, x) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-14));
  for (int df : {1, 3, 10}) CHECK(chisq_sf(df, 0.0) == 1.0);
  using boost::math::quadrature::gauss_kronrod;
  // density of chi^2(4): x e^{-x/2} / 4
  const double ref = gauss_kronrod<double, 61>::integrate([](double t) { return 0.25 * t * std::exp(-0.5 * t); }, 3.0,
                                                          std::numeric_limits<double>::infinity(), 15, 1e-15);
  CHECK(std::abs(chisq_sf(4, 3.0) - ref) <= 1e-10);
  CHECK_THROWS_AS(chisq_sf(0, 1.0), DomainError);
}

TEST_CASE("non-central chi-square survival function") {
  CHECK(noncentral_chisq_sf(4, 0.0, 3.0) == chisq_sf(4, 3.0));
  CHECK(noncentral_chisq_sf(2, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int df : {1, 3, 7})
    for (double ncp : {0.1, 2.0, 25.0, 400.0})
      for (double x : {0.5, 5.0, 30.0, 500.0}) {
        boost::math::non_central_chi_squared dist(df, ncp);
        const double ref = boost::math::cdf(boost::math::complement(dist, x));
        INFO("df=" << df << " ncp=" << ncp << " x=" << x);
        if (ref > 1e-250) CHECK(std::abs(noncentral_chisq_sf(df, ncp, x) - ref) <= 1e-10 * ref + 1e-15);
      }
  CHECK_THROWS_AS(noncentral_chisq_sf(2, -1.0, 1.0), DomainError);
}

TEST_CASE("non-central chi-square against simulation of |Z + mu|^2") {
  // ncp = |mu|^2 = 2 with mu = (1, 1, 0).
  constexpr int n = 10'000'000;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double a = z(rng) + 1.0, b = z(rng) + 1.0, c = z(rng);
    hits += (a * a + b * b + c * c >= 5.0);
  }
  const double p = static_cast<double>(hits) / n;
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(noncentral_chisq_sf(3, 2.0, 5.0) - p) <= 3.0 * se);
}

TEST_CASE("non-central chi-square monotonicity") {
  for (int df : {1, 4})
    for (double ncp = 0.0; ncp <= 20.0; ncp += 2.5)
      for (double x = 0.5; x <= 60.0; x += 2.5) {
        CHECK(noncentral_chisq_sf(df, ncp, x + 2.5) <= noncentral_chisq_sf(df, ncp, x));
        CHECK(noncentral_chisq_sf(df, ncp + 2.5, x) >= noncentral_chisq_sf(df, ncp, x));
      }
}

TEST_CASE("chi-square tail envelope") {
  CHECK(chisq_tail_asymptotic(2, 0.0, 7.0) == doctest::Approx(std::exp(-3.5)).epsilon(1e-15));
  CHECK(chisq_tail_asymptotic(4, 0.0, 10.0) == doctest::Approx(10.0 * std::exp(-5.0)).epsilon(1e-15));
  // The ratio to the exact tail settles to a constant for large x.
  double prev = noncentral_chisq_sf(3, 1.0, 50.0) / chisq_tail_asymptotic(3, 1.0, 50.0);
  for (double x = 60.0; x <= 200.0; x += 10.0) {
    const double r = noncentral_chisq_sf(3, 1.0, x) / chisq_tail_asymptotic(3, 1.0, x);
    CHECK(r > 0.01);
    CHECK(r < 100.0);
    CHECK(std::abs(r / prev - 1.0) < 0.05);
    prev = r;
  }
}
