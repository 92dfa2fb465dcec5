#include "eec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eec/errors.hpp"

namespace eec {
namespace {

constexpr std::size_t kMaxJacobiSize = 64;
constexpr int kMaxSweeps = 100;

void check_symmetric(const Matrix& s) {
  if (!s.is_square()) throw DomainError("sym_eigendecomposition: matrix is not square");
  if (s.rows() == 0 || s.rows() > kMaxJacobiSize)
    throw DomainError("sym_eigendecomposition: size must be in [1, 64]");
  if (!s.all_finite()) throw DomainError("sym_eigendecomposition: non-finite entry");
  const double tol = 1e-12 * std::max(s.frobenius_norm(), 1e-300);
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(s(i, j) - s(j, i)) > tol)
        throw DomainError("sym_eigendecomposition: matrix is not symmetric");
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

SymEigen sym_eigendecomposition(const Matrix& s) {
  check_symmetric(s);
  const std::size_t n = s.rows();
  Matrix a = s;
  // Symmetrize so rotations act on an exactly symmetric matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.5 * (s(i, j) + s(j, i));
  Matrix v = Matrix::identity(n);

  const double norm = a.frobenius_norm();
  const double target = 1e-16 * norm;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation annihilating a(p,q); smaller-angle root of t^2 + 2 zeta t - 1 = 0.
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(a) > target)
    throw ConvergenceError("sym_eigendecomposition: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEigen out{Matrix(n, n), std::vector<double>(n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = a(src, src);
    double sign = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(v(k, src)) > 1e-12) {
        sign = v(k, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = sign * v(k, src);
  }
  return out;
}

LqResult lq_decomposition(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows == 0 || rows > cols) throw DomainError("lq_decomposition: requires 0 < rows <= cols");
  if (!m.all_finite()) throw DomainError("lq_decomposition: non-finite entry");

  Matrix n = m;
  Matrix qt = Matrix::identity(cols);  // accumulated right transformation; Q = qt^T
  std::vector<double> v(cols);

  auto apply_right = [&](Matrix& target, std::size_t i, double beta) {
    // target <- target * (I - beta v v^T) on columns i..cols-1.
    for (std::size_t r = 0; r < target.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t k = i; k < cols; ++k) dot += target(r, k) * v[k];
      if (dot == 0.0) continue;
      const double f = beta * dot;
      for (std::size_t k = i; k < cols; ++k) target(r, k) -= f * v[k];
    }
  };
  auto negate_column = [&](Matrix& target, std::size_t i) {
    for (std::size_t r = 0; r < target.rows(); ++r) target(r, i) = -target(r, i);
  };

  for (std::size_t i = 0; i < rows; ++i) {
    double tail = 0.0;
    for (std::size_t k = i + 1; k < cols; ++k) tail = std::hypot(tail, n(i, k));
    if (tail != 0.0) {
      const double x0 = n(i, i);
      const double norm = std::hypot(x0, tail);
      const double alpha = x0 >= 0.0 ? -norm : norm;
      std::fill(v.begin(), v.end(), 0.0);
      v[i] = x0 - alpha;
      for (std::size_t k = i + 1; k < cols; ++k) v[k] = n(i, k);
      double vv = 0.0;
      for (std::size_t k = i; k < cols; ++k) vv += v[k] * v[k];
      const double beta = 2.0 / vv;
      apply_right(n, i, beta);
      apply_right(qt, i, beta);
      n(i, i) = alpha;
      for (std::size_t k = i + 1; k < cols; ++k) n(i, k) = 0.0;
    }
    if (n(i, i) < 0.0) {
      negate_column(n, i);
      negate_column(qt, i);
    }
  }
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = i + 1; k < cols; ++k) n(i, k) = 0.0;
  return {std::move(n), qt.transpose()};
}

void singular_values_2x2(double a, double b, double c, double d, double& s1, double& s2) {
  // [[a,b],[c,d]] = p*Rotation + q*Reflection with |p| = r1/2, |q| = r2/2.
  const double r1 = std::hypot(a + d, c - b);
  const double r2 = std::hypot(a - d, c + b);
  s1 = 0.5 * (r1 + r2);
  s2 = 0.5 * std::abs(r1 - r2);
}

std::vector<double> singular_values(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n < m) throw DomainError("singular_values: requires 0 < rows <= cols");
  if (m == 2 && n == 2) {
    double s1 = 0.0, s2 = 0.0;
    singular_values_2x2(a(0, 0), a(0, 1), a(1, 0), a(1, 1), s1, s2);
    return {s1, s2};
  }

  // One-sided (Hestenes) Jacobi: rotate row pairs until mutually orthogonal;
  // the row norms are then the singular values.
  Matrix u = a;
  constexpr double eps = 1e-15;
  bool rotated = true;
  int sweep = 0;
  for (; rotated && sweep < kMaxSweeps; ++sweep) {
    rotated = false;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          alpha += u(i, k) * u(i, k);
          beta += u(j, k) * u(j, k);
          gamma += u(i, k) * u(j, k);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < n; ++k) {
          const double ui = u(i, k);
          const double uj = u(j, k);
          u(i, k) = c * ui - s * uj;
          u(j, k) = s * ui + c * uj;
        }
      }
    }
  }
  if (rotated) throw ConvergenceError("singular_values: one-sided Jacobi did not converge");

  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm = std::hypot(norm, u(i, k));
    out[i] = norm;
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

void WishartParams::validate() const {
  if (m < 2 || n < m) throw DomainError("WishartParams: requires n >= m >= 2");
  if (scales.size() != m) throw DomainError("WishartParams: scales must have length m");
  for (double s : scales)
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("WishartParams: scales must be positive");
  if (mean.rows() != m || mean.cols() != n) throw DomainError("WishartParams: mean must be m x n");
  if (!mean.all_finite()) throw DomainError("WishartParams: mean has non-finite entries");
  for (std::size_t i = 0; i < m; ++i) {
    if (mean(i, i) < 0.0) throw DomainError("WishartParams: mean diagonal must be nonnegative");
    for (std::size_t j = i + 1; j < n; ++j)
      if (mean(i, j) != 0.0) throw DomainError("WishartParams: mean must be lower-triangular");
  }
}

WishartParams WishartParams::central(std::size_t m, std::size_t n, double s) {
  WishartParams p{m, n, std::vector<double>(m, s), Matrix(m, n)};
  p.validate();
  return p;
}

WishartParams canonicalize(const Matrix& sigma, const Matrix& mean) {
  const std::size_t m = sigma.rows();
  if (!sigma.is_square()) throw DomainError("canonicalize: sigma must be square");
  if (mean.rows() != m) throw DomainError("canonicalize: mean must have as many rows as sigma");
  if (m < 2 || mean.cols() < m) throw DomainError("canonicalize: requires n >= m >= 2");

  const SymEigen eig = sym_eigendecomposition(sigma);
  if (!(eig.values.back() > 0.0))
    throw DomainError("canonicalize: sigma is not positive definite");

  // Sigma^{1/2} = P^T D P with P = U^T; rotate the mean by P, then LQ.
  const Matrix rotated = eig.vectors.transpose() * mean;
  LqResult lq = lq_decomposition(rotated);

  WishartParams out;
  out.m = m;
  out.n = mean.cols();
  out.scales.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.scales[i] = 1.0 / eig.values[i];
  out.mean = std::move(lq.lower);
  out.validate();
  return out;
}

}  // namespace eec
