#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "benard/integrators.hpp"
#include "benard/optimizer.hpp"

namespace benard {

/// Deterministic controlled system dphi + [A phi + B(phi) + R phi] dt = sigma~(phi) h dt.
struct SkeletonModel {
  const Operators* ops = nullptr;
  const NoiseModel* noise = nullptr;
  IntegratorConfig config;  // epsilon is ignored
};

enum class TargetKind { Terminal, Path, Exit };
std::string to_string(TargetKind kind);

/// Terminal: |phi(T) - terminal| <= tolerance.
/// Path:     ||phi - path||_X <= tolerance (path recorded at every integrator step).
/// Exit:     ||phi - path||_X >= radius - tolerance, path = unforced skeleton.
struct ActionTarget {
  TargetKind kind = TargetKind::Terminal;
  Vec terminal;
  TrajectoryRecord path;
  double radius = 0.0;
  double tolerance = 1e-6;

  /// Constraint violation (>= 0) of a trajectory.
  double gap(const TrajectoryRecord& rec) const;
};

struct RateEvaluation {
  double action = 0.0;
  bool feasible = false;
  double gap = 0.0;
};

/// Action of the control and whether its skeleton meets the target. An infeasible
/// control stands for the empty-set convention (the infimum is +infinity).
RateEvaluation rate_function_eval(const SkeletonModel& model, const Vec& xi,
                                  const ControlPath& control, const ActionTarget& target);

struct MamSettings {
  std::vector<double> rho_schedule{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  int max_iters = 400;       // per rho stage
  double grad_tol = 1e-10;
  int control_steps = 0;     // 0: one control value per integrator step
};

struct ActionProblem {
  Vec xi;
  ActionTarget target;
  std::optional<double> M_cap;
  MamSettings settings;
  /// Optional starting control (zero if empty).
  std::optional<ControlPath> initial;
};

struct ActionResult {
  ControlPath h_star;
  double action_value = 0.0;
  double feasibility_gap = 0.0;
  bool feasible = false;
  bool within_cap = true;
  TrajectoryRecord trajectory;
  int iterations = 0;
  bool converged = false;
  std::vector<double> stage_actions;  // action after each rho stage
};

/// Whitened parametrisation of controls: x holds v = h / sqrt(lambda_j) on the modes
/// carrying noise, one block per control step.
class ControlMap {
 public:
  ControlMap(const CovarianceSpec& q, double horizon, int control_steps);
  int parameters() const { return static_cast<int>(support_.size()) * steps_; }
  int steps() const { return steps_; }
  const std::vector<int>& support() const { return support_; }
  ControlPath to_path(const Vec& x) const;
  Vec from_path(const ControlPath& h) const;  // throws InvalidControlError off support

 private:
  const CovarianceSpec* q_;
  double horizon_;
  int steps_;
  std::vector<int> support_;
};

/// Penalised objective J(x) = action + rho/2 gap^2 and its exact discrete-adjoint
/// gradient with respect to the whitened control coordinates.
class PenalizedAction {
 public:
  PenalizedAction(const SkeletonModel& model, const Vec& xi, const ActionTarget& target,
                  const ControlMap& map);
  double evaluate(const Vec& x, double rho, Vec* grad) const;
  /// Trajectory recorded at every integrator step for control x.
  TrajectoryRecord trajectory(const Vec& x) const;

 private:
  const SkeletonModel* model_;
  const Vec* xi_;
  const ActionTarget* target_;
  const ControlMap* map_;
};

ActionResult minimize_action(const SkeletonModel& model, const ActionProblem& problem);

// ---- experiments --------------------------------------------------------------

struct WeakConvergenceRow {
  double epsilon = 0.0;
  double mean = 0.0;       // E ||phi^eps_h - phi_h||_X^2
  double std_error = 0.0;
  int paths = 0;
  int blowups = 0;
};

/// Paths share their noise stream across epsilon (path p uses make_stream(seed, p) at
/// every epsilon), which keeps the epsilon dependence visible at modest path counts.
std::vector<WeakConvergenceRow> weak_convergence_experiment(
    const Operators& ops, const NoiseModel& noise, IntegratorConfig config, const Vec& xi,
    const ControlPath* h, const std::vector<double>& eps_grid, int paths, std::uint64_t seed,
    int threads);

/// Least-squares slope of log(mean) against log(epsilon) over rows with epsilon > 0.
double loglog_slope(const std::vector<WeakConvergenceRow>& rows);

struct CompactnessRow {
  int n = 0;
  double distance = 0.0;
};

/// h_n = h + amplitude sin(2 pi n t / T) g (cell averages over each integrator step).
std::vector<CompactnessRow> compactness_experiment(const Operators& ops, const NoiseModel& noise,
                                                   IntegratorConfig config, const Vec& xi,
                                                   const ControlPath& h, const Vec& g,
                                                   double amplitude, const std::vector<int>& n_list);

struct McLdpRow {
  double epsilon = 0.0;
  int paths = 0;
  int hits = 0;
  double probability = 0.0;
  double eps_log_p = 0.0;  // -inf when hits == 0
  bool no_hits = false;
  int blowups = 0;
};

/// Naive Monte Carlo for F = { ||phi^eps - phi_0||_X >= radius }, phi_0 the unforced skeleton.
std::vector<McLdpRow> mc_ldp_estimate(const Operators& ops, const NoiseModel& noise,
                                      IntegratorConfig config, const Vec& xi, double radius,
                                      const std::vector<double>& eps_grid, int paths,
                                      std::uint64_t seed, int threads);

}  // namespace benard
