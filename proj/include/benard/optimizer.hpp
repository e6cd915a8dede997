#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace benard {

struct LbfgsOptions {
  int max_iters = 500;
  double grad_tol = 1e-9;    // on |grad|_inf
  double value_tol = 1e-15;  // relative decrease below which we stop
  int memory = 12;
  double armijo = 1e-4;
  int max_backtracks = 50;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> history;  // accepted values, non-increasing
};

/// Value and gradient at x (gradient written into the second argument).
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a backtracking Armijo line search; every accepted step
/// decreases the objective.
LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options);

}  // namespace benard
