#pragma once

#include <vector>

namespace eec {

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n), nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

/// Affine map of the rule onto [a, b].
GaussLegendreRule gauss_legendre(int n, double a, double b);

}  // namespace eec
