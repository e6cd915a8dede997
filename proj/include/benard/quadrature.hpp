#pragma once

#include <vector>

namespace benard {

/// Nodes and weights of a quadrature rule on [0, 1].
struct VerticalQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }

  /// Trapezoidal rule with endpoints: exact for cos(pi m z) unless m is a
  /// nonzero multiple of 2 * intervals.
  static VerticalQuadrature trapezoid(int intervals);

  /// Gauss-Legendre rule with n nodes, exact for polynomials of degree 2n - 1.
  static VerticalQuadrature gauss_legendre(int n);
};

/// Legendre polynomials P_0..P_{n_max} and their first two derivatives at x.
void legendre_table(int n_max, double x, std::vector<double>& p,
                    std::vector<double>& dp, std::vector<double>& ddp);

}  // namespace benard
