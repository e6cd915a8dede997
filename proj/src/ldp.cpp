#include "benard/ldp.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "benard/ensemble.hpp"
#include "benard/error.hpp"

namespace benard {

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Terminal: return "terminal";
    case TargetKind::Path: return "path";
    case TargetKind::Exit: return "exit";
  }
  return "?";
}

double ActionTarget::gap(const TrajectoryRecord& rec) const {
  switch (kind) {
    case TargetKind::Terminal:
      if (terminal.size() != rec.states.back().size()) throw ShapeError("terminal target size mismatch");
      return (rec.states.back() - terminal).norm();
    case TargetKind::Path: return x_distance(rec, path);
    case TargetKind::Exit: return std::max(0.0, radius - x_distance(rec, path));
  }
  return 0.0;
}

RateEvaluation rate_function_eval(const SkeletonModel& model, const Vec& xi,
                                  const ControlPath& control, const ActionTarget& target) {
  RateEvaluation r;
  r.action = action(control, model.noise->q);
  IntegratorConfig cfg = model.config;
  if (target.kind != TargetKind::Terminal) {
    // The path comparison needs the skeleton on the target's record grid.
    const int records = target.path.size() - 1;
    if (records < 1 || cfg.n_steps % records != 0)
      throw ConfigError("target path grid does not match the integrator grid");
    cfg.record_stride = cfg.n_steps / records;
  }
  const auto rec = run_skeleton(*model.ops, *model.noise, xi, &control, cfg);
  r.gap = target.gap(rec);
  r.feasible = r.gap <= target.tolerance;
  return r;
}

ControlMap::ControlMap(const CovarianceSpec& q, double horizon, int control_steps)
    : q_(&q), horizon_(horizon), steps_(control_steps) {
  if (control_steps < 1) throw ConfigError("control_steps must be >= 1");
  for (int j = 0; j < q.size(); ++j)
    if (q.supported(j)) support_.push_back(j);
}

ControlPath ControlMap::to_path(const Vec& x) const {
  ControlPath h = ControlPath::zeros(horizon_, steps_, q_->size());
  const int m = static_cast<int>(support_.size());
  for (int s = 0; s < steps_; ++s)
    for (int i = 0; i < m; ++i) {
      const int j = support_[i];
      h.values(s, j) = std::sqrt(q_->lambdas[j]) * x[s * m + i];
    }
  return h;
}

Vec ControlMap::from_path(const ControlPath& h) const {
  if (h.steps() != steps_ || h.state_size() != q_->size())
    throw ShapeError("control path does not match the control map");
  const int m = static_cast<int>(support_.size());
  Vec x(parameters());
  for (int s = 0; s < steps_; ++s) {
    h0_norm_sq(*q_, h.at(s));  // rejects mass off the support
    for (int i = 0; i < m; ++i) {
      const int j = support_[i];
      x[s * m + i] = h.values(s, j) / std::sqrt(q_->lambdas[j]);
    }
  }
  return x;
}

PenalizedAction::PenalizedAction(const SkeletonModel& model, const Vec& xi,
                                 const ActionTarget& target, const ControlMap& map)
    : model_(&model), xi_(&xi), target_(&target), map_(&map) {
  if (model.config.n_steps % map.steps() != 0)
    throw ConfigError("control steps must divide the integrator steps");
  if (target.kind != TargetKind::Terminal && target.path.size() != model.config.n_steps + 1)
    throw ConfigError("target path must be recorded at every integrator step");
}

TrajectoryRecord PenalizedAction::trajectory(const Vec& x) const {
  IntegratorConfig cfg = model_->config;
  cfg.record_stride = 1;
  const ControlPath h = map_->to_path(x);
  return run_skeleton(*model_->ops, *model_->noise, *xi_, &h, cfg);
}

double PenalizedAction::evaluate(const Vec& x, double rho, Vec* grad) const {
  const auto& ops = *model_->ops;
  const auto& noise = *model_->noise;
  IntegratorConfig cfg = model_->config;
  cfg.epsilon = 0.0;
  cfg.record_stride = 1;
  const int n = ops.size();
  const int steps = cfg.n_steps;
  const int per_control = steps / map_->steps();
  const double dt = cfg.dt();
  const double dt_control = cfg.horizon / map_->steps();
  const ControlPath h = map_->to_path(x);

  Stepper stepper(ops, noise, cfg);
  OperatorWorkspace ws(ops.basis());
  TrajectoryRecord rec;
  try {
    rec = run_trajectory(stepper, *xi_, &h, nullptr, ws);
  } catch (const BlowUpError&) {
    return std::numeric_limits<double>::infinity();
  }
  const double act = 0.5 * dt_control * x.squaredNorm();

  // Penalty and its derivative with respect to each recorded state.
  const auto& tgt = *target_;
  std::vector<Vec> dphi(steps + 1, Vec::Zero(n));
  double penalty = 0.0;
  if (tgt.kind == TargetKind::Terminal) {
    const Vec d = rec.states.back() - tgt.terminal;
    penalty = 0.5 * rho * d.squaredNorm();
    dphi[steps] = rho * d;
  } else {
    const auto& eig = rec.eigenvalues;
    double sup = -1.0, integral = 0.0;
    int arg = 0;
    std::vector<Vec> diff(steps + 1);
    for (int k = 0; k <= steps; ++k) {
      diff[k] = rec.states[k] - tgt.path.states[k];
      const double d2 = diff[k].squaredNorm();
      if (d2 > sup) {
        sup = d2;
        arg = k;
      }
      if (k > 0) integral += (eig.array() * diff[k].array().square()).sum() * dt;
    }
    const double dist_sq = sup + integral;
    // d(dist^2)/d phi_k
    auto ddist_sq = [&](int k) {
      Vec g = Vec::Zero(n);
      if (k == arg) g += 2.0 * diff[k];
      if (k > 0) g += 2.0 * dt * eig.cwiseProduct(diff[k]);
      return g;
    };
    if (tgt.kind == TargetKind::Path) {
      penalty = 0.5 * rho * dist_sq;
      for (int k = 0; k <= steps; ++k) dphi[k] = 0.5 * rho * ddist_sq(k);
    } else {
      const double dist = std::sqrt(dist_sq);
      const double gap = std::max(0.0, tgt.radius - dist);
      penalty = 0.5 * rho * gap * gap;
      if (gap > 0.0 && dist > 0.0)
        for (int k = 0; k <= steps; ++k) dphi[k] = -rho * gap * ddist_sq(k) / (2.0 * dist);
    }
  }
  if (grad == nullptr) return act + penalty;

  // Discrete adjoint of phi_{k+1} = D^{-1}[phi_k - dt(B(phi_k) + R phi_k) + dt d~(phi_k) h_k].
  const Vec& inv = stepper.implicit_diagonal();
  const int m = static_cast<int>(map_->support().size());
  Vec grad_h = Vec::Zero(map_->steps() * n);
  Vec p = dphi[steps], q(n), t1(n), t2(n), d(n), dd(n);
  const bool dependent = noise.sigma_tilde.state_dependent();
  for (int k = steps - 1; k >= 0; --k) {
    const Vec& phi = rec.states[k];
    const int s = k / per_control;
    q = inv.cwiseProduct(p);
    noise.sigma_tilde.multiplier(phi, d);
    grad_h.segment(s * n, n) += dt * d.cwiseProduct(q);
    Vec next = q;
    if (cfg.nonlinear) {
      ops.apply_B_jacobian_transpose(phi, q, t1, ws);
      next -= dt * t1;
    }
    ops.apply_R(q, t2);
    next -= dt * t2;
    if (dependent) {
      noise.sigma_tilde.multiplier_derivative(phi, dd);
      next += dt * dd.cwiseProduct(h.values.row(s).transpose()).cwiseProduct(q);
    }
    p = next + dphi[k];
  }
  grad->resize(x.size());
  for (int s = 0; s < map_->steps(); ++s)
    for (int i = 0; i < m; ++i) {
      const int j = map_->support()[i];
      (*grad)[s * m + i] = dt_control * x[s * m + i] +
                           std::sqrt(noise.q.lambdas[j]) * grad_h[s * n + j];
    }
  return act + penalty;
}

ActionResult minimize_action(const SkeletonModel& model, const ActionProblem& problem) {
  const auto& cfg = model.config;
  const int control_steps =
      problem.settings.control_steps > 0 ? problem.settings.control_steps : cfg.n_steps;
  for (std::size_t i = 1; i < problem.settings.rho_schedule.size(); ++i)
    if (!(problem.settings.rho_schedule[i] > problem.settings.rho_schedule[i - 1]))
      throw ConfigError("mam.rho_schedule must be increasing");
  if (!(problem.target.tolerance > 0.0)) throw ConfigError("target tolerance must be positive");
  const ControlMap map(model.noise->q, cfg.horizon, control_steps);
  if (map.support().empty()) throw InvalidControlError("Q has no support: no admissible control");
  const PenalizedAction objective(model, problem.xi, problem.target, map);

  Vec x;
  if (problem.initial) {
    x = map.from_path(*problem.initial);
  } else if (problem.target.kind == TargetKind::Exit) {
    // The exit penalty is flat at h = 0; start from a small deterministic perturbation.
    Rng rng = make_stream(0x6d616dULL, 0);
    x.resize(map.parameters());
    for (int i = 0; i < x.size(); ++i) x[i] = 1e-2 * standard_normal(rng);
  } else {
    x = Vec::Zero(map.parameters());
  }

  ActionResult res;
  bool last_converged = false;
  for (double rho : problem.settings.rho_schedule) {
    LbfgsOptions opt;
    opt.max_iters = problem.settings.max_iters;
    opt.grad_tol = problem.settings.grad_tol;
    auto f = [&](const Vec& v, Vec& g) { return objective.evaluate(v, rho, &g); };
    const auto r = minimize_lbfgs(f, x, opt);
    x = r.x;
    res.iterations += r.iterations;
    last_converged = r.converged;
    res.stage_actions.push_back(0.5 * cfg.horizon / control_steps * x.squaredNorm());
  }
  res.h_star = map.to_path(x);
  res.action_value = action(res.h_star, model.noise->q);
  res.trajectory = objective.trajectory(x);
  res.feasibility_gap = problem.target.gap(res.trajectory);
  res.feasible = res.feasibility_gap <= problem.target.tolerance;
  res.converged = last_converged;
  if (problem.M_cap) res.within_cap = 2.0 * res.action_value <= *problem.M_cap;
  return res;
}

// ---- experiments --------------------------------------------------------------

std::vector<WeakConvergenceRow> weak_convergence_experiment(
    const Operators& ops, const NoiseModel& noise, IntegratorConfig config, const Vec& xi,
    const ControlPath* h, const std::vector<double>& eps_grid, int paths, std::uint64_t seed,
    int threads) {
  const auto skeleton = run_skeleton(ops, noise, xi, h, config);
  std::vector<WeakConvergenceRow> rows;
  for (double eps : eps_grid) {
    IntegratorConfig cfg = config;
    cfg.epsilon = eps;
    cfg.validate();
    const auto values = map_paths<double>(paths, seed, threads, [&](int, Rng& rng) {
      try {
        const auto rec = run_stochastic(ops, noise, xi, h, cfg, rng);
        const double d = x_distance(rec, skeleton);
        return d * d;
      } catch (const BlowUpError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    });
    WeakConvergenceRow row;
    row.epsilon = eps;
    std::vector<double> ok;
    for (double v : values) {
      if (std::isnan(v))
        ++row.blowups;
      else
        ok.push_back(v);
    }
    const auto est = estimate_mean(ok);
    row.mean = est.mean;
    row.std_error = est.std_error;
    row.paths = est.count;
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<WeakConvergenceRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!(r.epsilon > 0.0) || !(r.mean > 0.0)) continue;
    const double x = std::log(r.epsilon), y = std::log(r.mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<CompactnessRow> compactness_experiment(const Operators& ops, const NoiseModel& noise,
                                                   IntegratorConfig config, const Vec& xi,
                                                   const ControlPath& h, const Vec& g,
                                                   double amplitude, const std::vector<int>& n_list) {
  h0_norm_sq(noise.q, g);  // g must lie in H0
  const auto base = run_skeleton(ops, noise, xi, &h, config);
  const int steps = config.n_steps;
  const double dt = config.dt();
  std::vector<CompactnessRow> rows;
  for (int n : n_list) {
    if (n < 1) throw ConfigError("compactness.n_list entries must be >= 1");
    ControlPath hn = ControlPath::zeros(config.horizon, steps, h.state_size());
    const double omega = 2.0 * std::numbers::pi * n / config.horizon;
    for (int k = 0; k < steps; ++k) {
      const double avg = (std::cos(omega * k * dt) - std::cos(omega * (k + 1) * dt)) / (omega * dt);
      hn.values.row(k) = h.values.row(control_row(h, steps, k)) + amplitude * avg * g.transpose();
    }
    const auto rec = run_skeleton(ops, noise, xi, &hn, config);
    rows.push_back({n, x_distance(rec, base)});
  }
  return rows;
}

std::vector<McLdpRow> mc_ldp_estimate(const Operators& ops, const NoiseModel& noise,
                                      IntegratorConfig config, const Vec& xi, double radius,
                                      const std::vector<double>& eps_grid, int paths,
                                      std::uint64_t seed, int threads) {
  const auto phi0 = run_skeleton(ops, noise, xi, nullptr, config);
  std::vector<McLdpRow> rows;
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    IntegratorConfig cfg = config;
    cfg.epsilon = eps_grid[e];
    cfg.validate();
    // -1: blow-up, 0: miss, 1: hit
    const auto outcome = map_paths<int>(paths, splitmix64(seed + e), threads, [&](int, Rng& rng) {
      try {
        const auto rec = run_stochastic(ops, noise, xi, nullptr, cfg, rng);
        return x_distance(rec, phi0) >= radius ? 1 : 0;
      } catch (const BlowUpError&) {
        return -1;
      }
    });
    McLdpRow row;
    row.epsilon = cfg.epsilon;
    row.paths = paths;
    for (int o : outcome) {
      if (o < 0) ++row.blowups;
      if (o > 0) ++row.hits;
    }
    row.probability = static_cast<double>(row.hits) / paths;
    row.no_hits = row.hits == 0;
    row.eps_log_p = row.no_hits ? -std::numeric_limits<double>::infinity()
                                : cfg.epsilon * std::log(row.probability);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace benard
