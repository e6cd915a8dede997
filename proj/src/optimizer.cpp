#include "benard/optimizer.hpp"

#include <cmath>
#include <deque>

namespace benard {

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options) {
  using Eigen::VectorXd;
  LbfgsResult res;
  res.x = std::move(x0);
  VectorXd g(res.x.size());
  res.value = f(res.x, g);
  res.evaluations = 1;
  res.history.push_back(res.value);
  std::deque<VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int it = 0; it < options.max_iters; ++it) {
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (res.grad_norm <= options.grad_tol) {
      res.converged = true;
      res.reason = "gradient tolerance";
      return res;
    }
    // Two-loop recursion.
    VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    VectorXd d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // not a descent direction: restart from steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    if (s_hist.empty()) step = std::min(1.0, 1.0 / std::max(1e-300, g.norm()));
    VectorXd x_new, g_new(g.size());
    double f_new = 0.0;
    bool accepted = false;
    for (int b = 0; b < options.max_backtracks; ++b) {
      x_new = res.x + step * d;
      f_new = f(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= res.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.reason = "line search failed";
      res.converged = res.grad_norm <= 1e3 * options.grad_tol;
      return res;
    }
    const VectorXd s = x_new - res.x;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = res.value - f_new;
    res.x = std::move(x_new);
    g = g_new;
    res.value = f_new;
    res.iterations = it + 1;
    res.history.push_back(f_new);
    if (decrease <= options.value_tol * std::max(1.0, std::abs(f_new))) {
      res.grad_norm = g.lpNorm<Eigen::Infinity>();
      res.converged = true;
      res.reason = "no further decrease";
      return res;
    }
  }
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  res.reason = "iteration limit";
  return res;
}

}  // namespace benard
