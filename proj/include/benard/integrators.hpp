#pragma once

#include <optional>
#include <vector>

#include "benard/noise.hpp"
#include "benard/operators.hpp"
#include "benard/random.hpp"

namespace benard {

struct IntegratorConfig {
  double horizon = 1.0;
  int n_steps = 100;
  double epsilon = 0.0;
  int record_stride = 1;
  /// false drops B (linearised dynamics; used by the Gaussian oracles).
  bool nonlinear = true;

  double dt() const { return horizon / n_steps; }
  void validate() const;
};

/// Noise covariance with the diffusion coefficient in front of dW (sigma) and in
/// front of the control (sigma_tilde; equal to sigma in the LDP setting).
struct NoiseModel {
  CovarianceSpec q;
  DiffusionCoefficient sigma;
  DiffusionCoefficient sigma_tilde;
};

/// Snapshots every record_stride steps (t = 0 and t = T always included) with the
/// energy monitors. The monitors themselves are updated at every step.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> h_sq;      // |phi(t)|^2
  std::vector<double> v_sq;      // ||phi(t)||^2
  std::vector<double> sup_h_sq;  // sup_{s <= t} |phi(s)|^2
  std::vector<double> int_v_sq;  // right-point sum of ||phi||^2 dt up to t
  Vec eigenvalues;               // for V norms of differences
  int velocity_size = 0;

  int size() const { return static_cast<int>(times.size()); }
  double x_norm_sq() const { return sup_h_sq.back() + int_v_sq.back(); }
  /// Indicator of G_N(t) at each record: both monitors <= N.
  std::vector<bool> gN_flags(double N) const;
  bool in_G_N(double N) const { return sup_h_sq.back() <= N && int_v_sq.back() <= N; }
};

/// Semi-implicit Euler-Maruyama:
///   (I + dt A) phi_{k+1} = phi_k + dt (-B(phi_k) - R phi_k + sigma~(phi_k) h_k)
///                          + sqrt(eps) sigma(phi_k) dW_k.
class Stepper {
 public:
  Stepper(const Operators& ops, const NoiseModel& noise, IntegratorConfig config);

  const Operators& operators() const { return *ops_; }
  const NoiseModel& noise() const { return *noise_; }
  const IntegratorConfig& config() const { return config_; }
  const Vec& implicit_diagonal() const { return inv_diag_; }  // 1 / (1 + dt a)

  /// h and dw may be null (treated as zero). out must not alias phi.
  void step(const CVecRef& phi, const Vec* h, const Vec* dw, VecRef out,
            OperatorWorkspace& ws) const;

 private:
  const Operators* ops_;
  const NoiseModel* noise_;
  IntegratorConfig config_;
  Vec inv_diag_;
};

/// Path of phi under `control` (null = zero); rng is used only if epsilon > 0.
/// Throws BlowUpError at the first non-finite state.
TrajectoryRecord run_trajectory(const Stepper& stepper, const Vec& xi, const ControlPath* control,
                                Rng* rng, OperatorWorkspace& ws);

TrajectoryRecord run_skeleton(const Operators& ops, const NoiseModel& noise, const Vec& xi,
                              const ControlPath* control, IntegratorConfig config);
TrajectoryRecord run_stochastic(const Operators& ops, const NoiseModel& noise, const Vec& xi,
                                const ControlPath* control, IntegratorConfig config, Rng& rng);

/// Control value used during integrator step k (the control grid must divide n_steps).
int control_row(const ControlPath& control, int n_steps, int k);

/// sqrt( sup_t |a - b|^2 + sum ||a - b||^2 dt ) over the common record grid.
double x_distance(const TrajectoryRecord& a, const TrajectoryRecord& b);
/// X norm of a single record.
double x_norm(const TrajectoryRecord& a);

/// Per-path integral of |phi(s) - phi(s_bar)|^2 ds for dyadic level n (left Riemann sum
/// on the record grid, s_bar the right endpoint of the dyadic cell containing s).
double dyadic_increment(const TrajectoryRecord& rec, int level);

struct IncrementLevel {
  int level = 0;
  double mean = 0.0;      // I_n
  double std_error = 0.0;
  int paths_in_G_N = 0;
};
/// I_n = mean over paths of 1_{G_N(T)} * dyadic_increment, for levels 1..n_levels.
std::vector<IncrementLevel> dyadic_increment_statistic(const std::vector<TrajectoryRecord>& recs,
                                                       int n_levels, double N);

/// Accumulated discrete energy-balance residual of an unforced deterministic run
/// recorded at every step: sum_k | |phi_{k+1}|^2 - |phi_k|^2 + 2 dt <A phi_{k+1}, phi_{k+1}>
///                                 - 4 dt (u2, theta)_k |.
double energy_balance_residual(const TrajectoryRecord& rec, const Operators& ops, double dt);

}  // namespace benard
