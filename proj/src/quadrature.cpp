#include "benard/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace benard {

VerticalQuadrature VerticalQuadrature::trapezoid(int intervals) {
  if (intervals < 1) throw std::invalid_argument("trapezoid: intervals must be >= 1");
  VerticalQuadrature q;
  q.nodes.resize(intervals + 1);
  q.weights.assign(intervals + 1, 1.0 / intervals);
  for (int j = 0; j <= intervals; ++j) q.nodes[j] = static_cast<double>(j) / intervals;
  q.weights.front() *= 0.5;
  q.weights.back() *= 0.5;
  return q;
}

VerticalQuadrature VerticalQuadrature::gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  VerticalQuadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1]; nodes ascending.
    q.nodes[i] = 0.5 * (1.0 - x);
    q.weights[i] = 0.5 * w;
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[n - 1 - i] = 0.5 * w;
  }
  return q;
}

void legendre_table(int n_max, double x, std::vector<double>& p,
                    std::vector<double>& dp, std::vector<double>& ddp) {
  p.assign(n_max + 1, 0.0);
  dp.assign(n_max + 1, 0.0);
  ddp.assign(n_max + 1, 0.0);
  p[0] = 1.0;
  if (n_max == 0) return;
  p[1] = x;
  dp[1] = 1.0;
  for (int k = 1; k < n_max; ++k) {
    p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k, and the same relation differentiated.
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
    ddp[k + 1] = ddp[k - 1] + (2.0 * k + 1.0) * dp[k];
  }
}

}  // namespace benard
