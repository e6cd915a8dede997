#include "benard/integrators.hpp"

#include <fmt/format.h>

#include <cmath>

#include "benard/error.hpp"

namespace benard {

void IntegratorConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("integrator.T must be positive");
  if (n_steps < 1) throw ConfigError("integrator.n_steps must be >= 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("integrator.epsilon must be >= 0");
  if (record_stride < 1) throw ConfigError("integrator.record_stride must be >= 1");
}

std::vector<bool> TrajectoryRecord::gN_flags(double N) const {
  std::vector<bool> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = sup_h_sq[i] <= N && int_v_sq[i] <= N;
  return out;
}

Stepper::Stepper(const Operators& ops, const NoiseModel& noise, IntegratorConfig config)
    : ops_(&ops), noise_(&noise), config_(config) {
  config_.validate();
  if (noise.q.size() != ops.size()) throw ShapeError("covariance size does not match the basis");
  inv_diag_ = (1.0 + config_.dt() * ops.a_diagonal().array()).inverse().matrix();
}

void Stepper::step(const CVecRef& phi, const Vec* h, const Vec* dw, VecRef out,
                   OperatorWorkspace& ws) const {
  const double dt = config_.dt();
  const int n = ops_->size();
  Vec drift(n), r(n);
  if (config_.nonlinear)
    ops_->apply_B(phi, drift, ws);
  else
    drift.setZero();
  ops_->apply_R(phi, r);
  drift += r;
  out = phi - dt * drift;
  if (h != nullptr) {
    Vec d(n);
    noise_->sigma_tilde.multiplier(phi, d);
    out += dt * d.cwiseProduct(*h);
  }
  if (dw != nullptr && config_.epsilon > 0.0) {
    Vec d(n);
    noise_->sigma.multiplier(phi, d);
    out += std::sqrt(config_.epsilon) * d.cwiseProduct(*dw);
  }
  out = out.cwiseProduct(inv_diag_);
}

int control_row(const ControlPath& control, int n_steps, int k) {
  if (n_steps % control.steps() != 0)
    throw ConfigError(fmt::format("control grid ({} steps) must divide the integrator grid ({} steps)",
                                  control.steps(), n_steps));
  return k / (n_steps / control.steps());
}

namespace {

void push_record(TrajectoryRecord& rec, double t, const Vec& phi, double h2, double v2,
                 double sup_h, double int_v) {
  rec.times.push_back(t);
  rec.states.push_back(phi);
  rec.h_sq.push_back(h2);
  rec.v_sq.push_back(v2);
  rec.sup_h_sq.push_back(sup_h);
  rec.int_v_sq.push_back(int_v);
}

}  // namespace

TrajectoryRecord run_trajectory(const Stepper& stepper, const Vec& xi, const ControlPath* control,
                                Rng* rng, OperatorWorkspace& ws) {
  const auto& cfg = stepper.config();
  const auto& ops = stepper.operators();
  const auto& eig = ops.basis().eigenvalues();
  const int n = ops.size();
  if (xi.size() != n) throw ShapeError("initial condition size does not match the basis");
  if (control != nullptr) {
    if (control->state_size() != n) throw ShapeError("control size does not match the basis");
    control_row(*control, cfg.n_steps, 0);
  }
  const bool noisy = cfg.epsilon > 0.0;
  if (noisy && rng == nullptr) throw std::invalid_argument("stochastic run needs a generator");

  TrajectoryRecord rec;
  rec.eigenvalues = eig;
  rec.velocity_size = ops.velocity_size();
  const double dt = cfg.dt();
  Vec phi = xi, next(n), h(n), dw(n);
  double h2 = phi.squaredNorm();
  double v2 = (eig.array() * phi.array().square()).sum();
  double sup_h = h2, int_v = 0.0;
  push_record(rec, 0.0, phi, h2, v2, sup_h, int_v);

  for (int k = 0; k < cfg.n_steps; ++k) {
    const Vec* hp = nullptr;
    if (control != nullptr) {
      h = control->values.row(control_row(*control, cfg.n_steps, k)).transpose();
      hp = &h;
    }
    const Vec* dwp = nullptr;
    if (noisy) {
      sample_wiener_increment(stepper.noise().q, dt, *rng, dw);
      dwp = &dw;
    }
    stepper.step(phi, hp, dwp, next, ws);
    if (!next.allFinite())
      throw BlowUpError(k + 1, (k + 1) * dt,
                        fmt::format("state became non-finite at step {} (t = {})", k + 1, (k + 1) * dt));
    phi.swap(next);
    h2 = phi.squaredNorm();
    v2 = (eig.array() * phi.array().square()).sum();
    sup_h = std::max(sup_h, h2);
    int_v += v2 * dt;
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == cfg.n_steps)
      push_record(rec, (k + 1) * dt, phi, h2, v2, sup_h, int_v);
  }
  return rec;
}

TrajectoryRecord run_skeleton(const Operators& ops, const NoiseModel& noise, const Vec& xi,
                              const ControlPath* control, IntegratorConfig config) {
  config.epsilon = 0.0;
  Stepper stepper(ops, noise, config);
  OperatorWorkspace ws(ops.basis());
  return run_trajectory(stepper, xi, control, nullptr, ws);
}

TrajectoryRecord run_stochastic(const Operators& ops, const NoiseModel& noise, const Vec& xi,
                                const ControlPath* control, IntegratorConfig config, Rng& rng) {
  Stepper stepper(ops, noise, config);
  OperatorWorkspace ws(ops.basis());
  return run_trajectory(stepper, xi, control, &rng, ws);
}

double x_distance(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.size() != b.size() || a.eigenvalues.size() != b.eigenvalues.size())
    throw ShapeError("x_distance: records are on different grids");
  double sup = 0.0, integral = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * (1.0 + std::abs(a.times[i])))
      throw ShapeError("x_distance: record times differ");
    const Vec d = a.states[i] - b.states[i];
    sup = std::max(sup, d.squaredNorm());
    if (i > 0)
      integral += (a.eigenvalues.array() * d.array().square()).sum() * (a.times[i] - a.times[i - 1]);
  }
  return std::sqrt(sup + integral);
}

double x_norm(const TrajectoryRecord& a) {
  double sup = 0.0, integral = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    sup = std::max(sup, a.h_sq[i]);
    if (i > 0) integral += a.v_sq[i] * (a.times[i] - a.times[i - 1]);
  }
  return std::sqrt(sup + integral);
}

double dyadic_increment(const TrajectoryRecord& rec, int level) {
  const int m = rec.size() - 1;
  const int cells = 1 << level;
  if (m % cells != 0)
    throw ConfigError(fmt::format("dyadic level {} needs the record count ({}) to be a multiple of {}",
                                  level, m, cells));
  const int per_cell = m / cells;
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const int right = (i / per_cell + 1) * per_cell;
    total += (rec.states[i] - rec.states[right]).squaredNorm() * (rec.times[i + 1] - rec.times[i]);
  }
  return total;
}

std::vector<IncrementLevel> dyadic_increment_statistic(const std::vector<TrajectoryRecord>& recs,
                                                       int n_levels, double N) {
  std::vector<IncrementLevel> out;
  for (int level = 1; level <= n_levels; ++level) {
    IncrementLevel row;
    row.level = level;
    double s = 0.0, s2 = 0.0;
    for (const auto& r : recs) {
      double v = 0.0;
      if (r.in_G_N(N)) {
        v = dyadic_increment(r, level);
        ++row.paths_in_G_N;
      }
      s += v;
      s2 += v * v;
    }
    const double n = static_cast<double>(recs.size());
    if (n > 0) {
      row.mean = s / n;
      const double var = n > 1 ? std::max(0.0, (s2 - n * row.mean * row.mean) / (n - 1)) : 0.0;
      row.std_error = std::sqrt(var / n);
    }
    out.push_back(row);
  }
  return out;
}

double energy_balance_residual(const TrajectoryRecord& rec, const Operators& ops, double dt) {
  const int nv = ops.velocity_size();
  const int nt = ops.size() - nv;
  const auto& a = ops.a_diagonal();
  double total = 0.0;
  for (int k = 0; k + 1 < rec.size(); ++k) {
    const Vec& p0 = rec.states[k];
    const Vec& p1 = rec.states[k + 1];
    const double coupling = p0.head(nv).dot(ops.coupling() * p0.tail(nt));
    const double r = p1.squaredNorm() - p0.squaredNorm() +
                     2.0 * dt * (a.array() * p1.array().square()).sum() - 4.0 * dt * coupling;
    total += std::abs(r);
  }
  return total;
}

}  // namespace benard
