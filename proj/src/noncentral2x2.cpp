#include "eec/noncentral2x2.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "eec/errors.hpp"
#include "eec/gauss_legendre.hpp"
#include "eec/special.hpp"
#include "eec/summation.hpp"

namespace eec {
namespace {

using std::numbers::pi;

// exp(-R/2) underflows to exactly zero past this R.
constexpr double kNegligibleR = 1500.0;

struct AngleNode {
  double cos_v;
  double sin_v;
  double weight;
  bool coarse;  // member of the half-size trapezoid grid
};

// Coefficients of R(sigma, b) = css s^2 + 2 csb s b + cbb b^2 + ls s + lb b + c0
// for one fixed (theta, phi) pair.
struct QuadraticForm {
  double css, csb, cbb, ls, lb, c0;
  double weight;
  bool coarse;
};

struct Grid {
  std::vector<QuadraticForm> forms;
  double coarse_scale = 0.0;  // weight multiplier for the coarse-only sum; 0 if none
};

std::vector<AngleNode> trapezoid_angles(int n) {
  std::vector<AngleNode> out(n);
  const double h = 2.0 * pi / n;
  for (int i = 0; i < n; ++i) {
    const double t = h * i;
    out[i] = {std::cos(t), std::sin(t), h, i % 2 == 0};
  }
  return out;
}

// u in R folded onto [-1, 1] via u -> 1/u; the folded branch flips the cosine.
std::vector<AngleNode> rational_angles(int n) {
  const GaussLegendreRule gl = gauss_legendre(n);
  std::vector<AngleNode> out;
  out.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    const double v = gl.nodes[i];
    const double d = 1.0 + v * v;
    const double c = (1.0 - v * v) / d;
    const double s = 2.0 * v / d;
    const double w = 2.0 * gl.weights[i] / d;  // d(theta) = 2 du / (1 + u^2)
    out.push_back({c, s, w, false});
    out.push_back({-c, s, w, false});
  }
  return out;
}

QuadraticForm make_form(const AngleNode& th, const AngleNode& ph, const Params2x2& p) {
  // A = sigma U + b V with U = g h^T, V = G H^T, g = (c, s), G = (-s, c).
  const double ct = th.cos_v, st = th.sin_v, cp = ph.cos_v, sp = ph.sin_v;
  const double u11 = ct * cp, u12 = ct * sp, u21 = st * cp, u22 = st * sp;
  const double v11 = st * sp, v12 = -st * cp, v21 = -ct * sp, v22 = ct * cp;
  QuadraticForm f{};
  f.css = p.s1 * (u11 * u11 + u12 * u12) + p.s2 * (u21 * u21 + u22 * u22);
  f.csb = p.s1 * (u11 * v11 + u12 * v12) + p.s2 * (u21 * v21 + u22 * v22);
  f.cbb = p.s1 * (v11 * v11 + v12 * v12) + p.s2 * (v21 * v21 + v22 * v22);
  f.ls = -2.0 * (p.s1 * u11 * p.m11 + p.s2 * (u21 * p.m21 + u22 * p.m22));
  f.lb = -2.0 * (p.s1 * v11 * p.m11 + p.s2 * (v21 * p.m21 + v22 * p.m22));
  f.c0 = p.s1 * p.m11 * p.m11 + p.s2 * (p.m21 * p.m21 + p.m22 * p.m22);
  f.weight = th.weight * ph.weight;
  f.coarse = th.coarse && ph.coarse;
  return f;
}

Grid make_grid(const std::vector<AngleNode>& angles, const Params2x2& p, double coarse_scale) {
  Grid g;
  g.forms.reserve(angles.size() * angles.size());
  for (const auto& th : angles)
    for (const auto& ph : angles) g.forms.push_back(make_form(th, ph, p));
  g.coarse_scale = coarse_scale;
  return g;
}

unsigned resolve_workers(unsigned w) {
  if (w != 0) return w;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, count) across workers; each index is written by
// exactly one worker, so results do not depend on the worker count.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
}

struct FixedResult {
  double full = 0.0;
  double coarse = 0.0;  // half-size angle grid, same radial rule
};

FixedResult integrate_fixed(const Params2x2& p, double x, BRegion region, const Grid& grid, int n_sigma,
                            int n_b, double radius, unsigned workers) {
  FixedResult out;
  if (x >= radius) return out;
  const GaussLegendreRule sigma_rule = gauss_legendre(n_sigma, x, radius);
  const GaussLegendreRule unit_b = gauss_legendre(n_b);
  std::vector<double> full(n_sigma, 0.0), coarse(n_sigma, 0.0);

  parallel_for(static_cast<std::size_t>(n_sigma), workers, [&](std::size_t k) {
    const double sigma = sigma_rule.nodes[k];
    double lo = -radius, hi = radius;
    if (region == BRegion::BelowSigma) {
      lo = x;
      hi = sigma;
    } else if (region == BRegion::AboveSigma) {
      lo = sigma;
      hi = radius;
    }
    if (hi <= lo) return;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    std::vector<double> b(n_b), wb(n_b), poly(n_b);
    for (int j = 0; j < n_b; ++j) {
      b[j] = mid + half * unit_b.nodes[j];
      wb[j] = half * unit_b.weights[j];
      poly[j] = wb[j] * (sigma * sigma - b[j] * b[j]);
    }
    double acc_full = 0.0, acc_coarse = 0.0;
    for (const QuadraticForm& f : grid.forms) {
      const double lin = 2.0 * f.csb * sigma + f.lb;
      const double con = (f.css * sigma + f.ls) * sigma + f.c0;
      // min over b of cbb b^2 + lin b + con; skip rows that underflow everywhere.
      const double rmin = con - 0.25 * lin * lin / f.cbb;
      if (rmin > kNegligibleR) continue;
      double row = 0.0;
      for (int j = 0; j < n_b; ++j) {
        const double r = (f.cbb * b[j] + lin) * b[j] + con;
        row += poly[j] * std::exp(-0.5 * r);
      }
      acc_full += f.weight * row;
      if (f.coarse) acc_coarse += f.weight * row;
    }
    full[k] = sigma_rule.weights[k] * acc_full;
    coarse[k] = sigma_rule.weights[k] * acc_coarse;
  });

  const double scale = 0.5 * p.s1 * p.s2 / (4.0 * pi * pi);
  out.full = scale * pairwise_sum(full);
  out.coarse = scale * grid.coarse_scale * pairwise_sum(coarse);
  return out;
}

double resolve_radius(const Params2x2& p, const QuadratureSpec& q) {
  const double r = truncation_radius(p, 0.1 * q.tol);
  double radius = r;
  for (const auto& manual : {q.sigma_max, q.b_max}) {
    if (!manual) continue;
    if (*manual < r) throw DomainError("QuadratureSpec: truncation radius below the derived bound");
    radius = std::max(radius, *manual);
  }
  return radius;
}

}  // namespace

void Params2x2::validate() const {
  if (!(s1 > 0.0) || !(s2 > 0.0) || !std::isfinite(s1) || !std::isfinite(s2))
    throw DomainError("Params2x2: s1, s2 must be positive");
  if (!std::isfinite(m11) || !std::isfinite(m21) || !std::isfinite(m22))
    throw DomainError("Params2x2: mean entries must be finite");
  if (m11 < 0.0 || m22 < 0.0) throw DomainError("Params2x2: m11, m22 must be nonnegative");
}

void QuadratureSpec::validate() const {
  if (!(tol > 0.0)) throw DomainError("QuadratureSpec: tol must be positive");
  if (n_angle < 4 || n_sigma < 4 || n_b < 4) throw DomainError("QuadratureSpec: orders must be >= 4");
  if (max_order < std::max({n_angle, n_sigma, n_b})) throw DomainError("QuadratureSpec: max_order below start order");
  for (const auto& r : {sigma_max, b_max})
    if (r && !(*r > 0.0)) throw DomainError("QuadratureSpec: radii must be positive");
}

double integrand_R(double sigma, double b, double theta, double phi, const Params2x2& p) {
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  const double t1 = b * st * sp + sigma * ct * cp - p.m11;
  const double t2 = sigma * st * cp - b * ct * sp - p.m21;
  const double t3 = sigma * ct * sp - b * st * cp;
  const double t4 = b * ct * cp + sigma * st * sp - p.m22;
  return p.s1 * t1 * t1 + p.s2 * t2 * t2 + p.s1 * t3 * t3 + p.s2 * t4 * t4;
}

int euler_char_exact_2x2(double sigma, double b, double x) {
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  const double d = sigma * sigma - b * b;
  return (sigma >= x ? sgn(d) : 0) + (b >= x ? sgn(-d) : 0);
}

double integrand_angular(double sigma, double b, double theta, double phi, const Params2x2& p) {
  const double r = integrand_R(sigma, b, theta, phi, p);
  return 0.5 * (sigma * sigma - b * b) * p.s1 * p.s2 / (4.0 * pi * pi) * std::exp(-0.5 * r);
}

double integrand_rational(double sigma, double b, double u, double t, const Params2x2& p) {
  const double du = 1.0 + u * u, dt = 1.0 + t * t;
  const double st = 2.0 * u / du, ct = (1.0 - u * u) / du;
  const double sp = 2.0 * t / dt, cp = (1.0 - t * t) / dt;
  const double t1 = b * st * sp + sigma * ct * cp - p.m11;
  const double t2 = sigma * st * cp - b * ct * sp - p.m21;
  const double t3 = sigma * ct * sp - b * st * cp;
  const double t4 = b * ct * cp + sigma * st * sp - p.m22;
  const double r = p.s1 * t1 * t1 + p.s2 * t2 * t2 + p.s1 * t3 * t3 + p.s2 * t4 * t4;
  return p.s1 * p.s2 * (sigma * sigma - b * b) / (2.0 * pi * pi * du * dt) * std::exp(-0.5 * r);
}

double truncation_mass_bound(const Params2x2& p, double rho) {
  const double mu = std::sqrt(p.m11 * p.m11 + p.m21 * p.m21 + p.m22 * p.m22);
  const double s = std::min(p.s1, p.s2);
  if (rho <= mu) return std::numeric_limits<double>::infinity();
  // (mu + t)^3 expanded; int_{t0}^inf t^k e^{-s t^2/2} dt = u(s, k/2, t0).
  const double t0 = rho - mu;
  const double mass = mu * mu * mu * gaussian_tail_u(s, 0.0, t0) + 3.0 * mu * mu * gaussian_tail_u(s, 0.5, t0) +
                      3.0 * mu * gaussian_tail_u(s, 1.0, t0) + gaussian_tail_u(s, 1.5, t0);
  return pi * p.s1 * p.s2 * mass;
}

double truncation_radius(const Params2x2& p, double mass) {
  p.validate();
  if (!(mass > 0.0)) throw DomainError("truncation_radius: mass must be positive");
  const double mu = std::sqrt(p.m11 * p.m11 + p.m21 * p.m21 + p.m22 * p.m22);
  const double width = 1.0 / std::sqrt(std::min(p.s1, p.s2));
  double lo = mu;
  double hi = mu + width;
  while (truncation_mass_bound(p, hi) > mass) {
    lo = hi;
    hi = mu + 2.0 * (hi - mu);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (truncation_mass_bound(p, mid) > mass ? lo : hi) = mid;
  }
  return hi;
}

double expected_euler_2x2_region(const Params2x2& p, double x, BRegion region, int n_angle, int n_sigma,
                                 int n_b, double radius, unsigned workers) {
  p.validate();
  if (!(x >= 0.0)) throw DomainError("expected_euler_2x2_region: x must be nonnegative");
  const Grid grid = make_grid(trapezoid_angles(n_angle), p, 0.0);
  return integrate_fixed(p, x, region, grid, n_sigma, n_b, radius, workers).full;
}

QuadratureResult expected_euler_2x2(const Params2x2& p, double x, const QuadratureSpec& q) {
  p.validate();
  q.validate();
  if (!(x >= 0.0)) throw DomainError("expected_euler_2x2: x must be nonnegative");
  const double radius = resolve_radius(p, q);
  const double truncation = truncation_mass_bound(p, radius);

  QuadratureResult res;
  res.sigma_max = res.b_max = radius;
  if (x >= radius) {
    res.value = 0.0;
    res.error_estimate = truncation;
    res.converged = true;
    return res;
  }

  int n_angle = q.n_angle + (q.n_angle % 2);
  int n_sigma = q.n_sigma;
  int n_b = q.n_b;
  std::optional<double> previous;
  double best = 0.0, best_err = std::numeric_limits<double>::infinity();
  while (true) {
    const Grid grid = make_grid(trapezoid_angles(n_angle), p, 4.0);
    const FixedResult r = integrate_fixed(p, x, BRegion::Full, grid, n_sigma, n_b, radius, q.workers);
    const double angle_err = std::abs(r.full - r.coarse);
    if (angle_err > 0.5 * q.tol && 2 * n_angle <= q.max_order) {
      n_angle *= 2;
      previous.reset();
      continue;
    }
    const double radial_err = previous ? std::abs(r.full - *previous) : std::numeric_limits<double>::infinity();
    const double err = std::max(radial_err, angle_err) + truncation;
    if (err < best_err || !previous) {
      best = r.full;
      best_err = err;
    }
    res.n_angle = n_angle;
    res.n_sigma = n_sigma;
    res.n_b = n_b;
    if (previous && radial_err + angle_err <= q.tol) {
      res.value = r.full;
      res.error_estimate = err;
      res.converged = true;
      return res;
    }
    if (2 * std::max(n_sigma, n_b) > q.max_order) break;
    previous = r.full;
    n_sigma *= 2;
    n_b *= 2;
  }
  res.value = best;
  res.error_estimate = best_err;
  res.converged = false;
  return res;
}

QuadratureResult expected_euler_2x2_rational(const Params2x2& p, double x, const QuadratureSpec& q) {
  p.validate();
  q.validate();
  if (!(x >= 0.0)) throw DomainError("expected_euler_2x2_rational: x must be nonnegative");
  const double radius = resolve_radius(p, q);
  const double truncation = truncation_mass_bound(p, radius);

  QuadratureResult res;
  res.sigma_max = res.b_max = radius;
  if (x >= radius) {
    res.error_estimate = truncation;
    res.converged = true;
    return res;
  }
  // Gauss-Legendre in u does not nest, so angles refine together with the radial orders.
  int n_angle = q.n_angle;
  int n_sigma = q.n_sigma;
  int n_b = q.n_b;
  std::optional<double> previous;
  double best = 0.0, best_err = std::numeric_limits<double>::infinity();
  while (true) {
    const Grid grid = make_grid(rational_angles(n_angle), p, 0.0);
    const double value = integrate_fixed(p, x, BRegion::Full, grid, n_sigma, n_b, radius, q.workers).full;
    const double delta = previous ? std::abs(value - *previous) : std::numeric_limits<double>::infinity();
    if (previous && delta + truncation < best_err) {
      best = value;
      best_err = delta + truncation;
    }
    res.n_angle = n_angle;
    res.n_sigma = n_sigma;
    res.n_b = n_b;
    if (previous && delta <= q.tol) {
      res.value = value;
      res.error_estimate = delta + truncation;
      res.converged = true;
      return res;
    }
    if (2 * std::max({n_angle, n_sigma, n_b}) > q.max_order) {
      if (!previous) best = value;
      break;
    }
    previous = value;
    n_angle *= 2;
    n_sigma *= 2;
    n_b *= 2;
  }
  res.value = best;
  res.error_estimate = best_err;
  res.converged = false;
  return res;
}

}  // namespace eec
