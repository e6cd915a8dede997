#include <doctest.h>

#include <cmath>

#include "benard/error.hpp"
#include "benard/ldp.hpp"
#include "benard/optimizer.hpp"
#include "test_support.hpp"

using namespace benard;

namespace {

NoiseModel model_noise(const Vec& lambdas, DiffusionCoefficient s = DiffusionCoefficient::additive(1.0)) {
  return {CovarianceSpec::explicit_list(lambdas), s, s};
}

// Discrete controllability Gramian of phi_{k+1} = G phi_k + dt D h_k with the action
// 1/2 sum_k |h_k|_0^2 dt: minimum action to reach r = target - G^N xi is 1/2 r^T W^{-1} r,
// W = dt sum_j G^j D Q D (G^j)^T.
double discrete_gramian_action(const Operators& ops, const Vec& lam, const Vec& xi,
                               const Vec& target, double T, int n) {
  const int m = ops.size();
  const double dt = T / n;
  Eigen::MatrixXd R(m, m);
  Vec e(m), col(m);
  for (int j = 0; j < m; ++j) {
    e.setZero();
    e[j] = 1.0;
    ops.apply_R(e, col);
    R.col(j) = col;
  }
  const Eigen::MatrixXd D = (Vec::Ones(m) + dt * ops.a_diagonal()).cwiseInverse().asDiagonal();
  const Eigen::MatrixXd G = D * (Eigen::MatrixXd::Identity(m, m) - dt * R);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m), Gj = Eigen::MatrixXd::Identity(m, m);
  Vec free = xi;
  for (int j = 0; j < n; ++j) {
    W += dt * Gj * D * lam.asDiagonal() * D * Gj.transpose();
    Gj = G * Gj;
    free = G * free;
  }
  const Vec r = target - free;
  return 0.5 * r.dot(W.ldlt().solve(r));
}

}  // namespace

TEST_CASE("L-BFGS minimises the Rosenbrock function monotonically") {
  Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    double v = 0;
    g.setZero(x.size());
    for (int i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i], b = 1 - x[i];
      v += 100 * a * a + b * b;
      g[i] += -400 * a * x[i] - 2 * b;
      g[i + 1] += 200 * a;
    }
    return v;
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(6, -1.2);
  LbfgsOptions opt;
  opt.max_iters = 2000;
  const auto r = minimize_lbfgs(f, x0, opt);
  CHECK(r.converged);
  CHECK((r.x - Eigen::VectorXd::Ones(6)).norm() < 1e-6);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("control map whitening round trip and support") {
  Vec lam(3);
  lam << 4.0, 0.0, 0.25;
  const auto q = CovarianceSpec::explicit_list(lam);
  const ControlMap map(q, 2.0, 5);
  CHECK(map.parameters() == 10);
  CHECK(map.support() == std::vector<int>{0, 2});
  Vec x = Vec::LinSpaced(10, -1, 1);
  const auto h = map.to_path(x);
  CHECK(h.values(0, 0) == doctest::Approx(2.0 * x[0]));
  CHECK(h.values.col(1).isZero());
  // whitened coordinates: the action is 1/2 dt |x|^2
  CHECK(action(h, q) == doctest::Approx(0.5 * 0.4 * x.squaredNorm()));
  CHECK((map.from_path(h) - x).norm() < 1e-15);
  auto bad = h;
  bad.values(1, 1) = 1.0;
  CHECK_THROWS_AS(map.from_path(bad), InvalidControlError);
}

TEST_CASE("action scales quadratically and feasibility is reported") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {1.0, 1.0});
  const auto noise = model_noise(Vec::Ones(2));
  SkeletonModel model{&ops, &noise, IntegratorConfig{1.0, 20, 0.0, 1, true}};
  auto h = ControlPath::zeros(1.0, 20, 2);
  h.values.setConstant(0.3);
  ActionTarget t;
  t.terminal = Vec::Constant(2, 5.0);
  t.tolerance = 1e-3;
  const auto a = rate_function_eval(model, Vec::Zero(2), h, t);
  auto h3 = h;
  h3.values *= 3.0;
  const auto a3 = rate_function_eval(model, Vec::Zero(2), h3, t);
  CHECK(a3.action == doctest::Approx(9.0 * a.action).epsilon(1e-15));
  CHECK_FALSE(a.feasible);
  CHECK(a.gap > 0.0);
}

TEST_CASE("adjoint gradient matches central differences for every target kind") {
  const auto b = testing::free_slip_basis(2);
  const Operators ops(b, {0.5, 0.5});
  Vec lam = (1.0 + b.eigenvalues().array()).inverse().matrix();
  lam[3] = 0.0;  // one mode without noise
  for (auto sigma : {DiffusionCoefficient::additive(0.8), DiffusionCoefficient::diagonal_bounded(0.5, 0.3),
                     DiffusionCoefficient::linear_clipped(0.7, 2.0)}) {
    const auto noise = model_noise(lam, sigma);
    IntegratorConfig cfg{0.5, 20, 0.0, 1, true};
    SkeletonModel model{&ops, &noise, cfg};
    Rng rng = make_stream(31, 0);
    Vec xi(b.size());
    for (int i = 0; i < b.size(); ++i) xi[i] = 0.5 * standard_normal(rng);
    const auto base = run_skeleton(ops, noise, xi, nullptr, cfg);
    for (auto kind : {TargetKind::Terminal, TargetKind::Path, TargetKind::Exit}) {
      ActionTarget t;
      t.kind = kind;
      t.terminal = Vec::Constant(b.size(), 0.2);
      t.path = base;
      t.path.states.back() *= 1.5;  // keep the path gap away from zero
      t.radius = 5.0;
      const ControlMap map(noise.q, cfg.horizon, 10);
      const PenalizedAction J(model, xi, t, map);
      Vec x(map.parameters());
      for (int i = 0; i < x.size(); ++i) x[i] = standard_normal(rng);
      Vec g;
      J.evaluate(x, 50.0, &g);
      double worst = 0.0;
      for (int c = 0; c < 20; ++c) {
        const int i = (c * 7) % x.size();
        const double h = 1e-5;
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (J.evaluate(xp, 50.0, nullptr) - J.evaluate(xm, 50.0, nullptr)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g[i]) / std::max(1e-8, std::abs(g[i]) + std::abs(fd)));
      }
      CHECK_MESSAGE(worst <= 1e-5, to_string(kind) << " " << to_string(sigma.family()));
    }
  }
}

TEST_CASE("MAM on the linear toy reproduces the discrete Gramian value") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {0.1, 0.1});
  Vec lam(2);
  lam << 1.0, 0.5;
  const auto noise = model_noise(lam);
  IntegratorConfig cfg{1.0, 100, 0.0, 1, false};
  SkeletonModel model{&ops, &noise, cfg};
  ActionProblem p;
  p.xi = Vec::Constant(2, 0.1);
  p.target.terminal = Vec(2);
  p.target.terminal << 1.0, -0.5;
  p.target.tolerance = 1e-4;
  p.M_cap = 100.0;
  const auto res = minimize_action(model, p);
  const double oracle = discrete_gramian_action(ops, lam, p.xi, p.target.terminal, 1.0, 100);
  CHECK(res.feasible);
  CHECK(res.within_cap);
  CHECK(res.action_value == doctest::Approx(oracle).epsilon(1e-4));
  CHECK(res.action_value >= oracle * (1 - 1e-2));
  for (std::size_t i = 1; i < res.stage_actions.size(); ++i)
    CHECK(res.stage_actions[i] >= res.stage_actions[i - 1] - 1e-12);  // penalty tightens
  // a coarser control grid can only cost more
  p.settings.control_steps = 10;
  const auto coarse = minimize_action(model, p);
  CHECK(coarse.action_value >= res.action_value * (1 - 1e-6));
}

TEST_CASE("MAM: exit target with a nonlinear model reaches the boundary") {
  const auto b = testing::free_slip_basis(2);
  const Operators ops(b, {1.0, 1.0});
  const auto noise = model_noise((1.0 + b.eigenvalues().array()).inverse().matrix());
  IntegratorConfig cfg{0.5, 40, 0.0, 1, true};
  SkeletonModel model{&ops, &noise, cfg};
  ActionProblem p;
  p.xi = Vec::Zero(b.size());
  p.xi[0] = 0.5;
  p.target.kind = TargetKind::Exit;
  p.target.path = run_skeleton(ops, noise, p.xi, nullptr, cfg);
  p.target.radius = 0.3;
  p.target.tolerance = 1e-3;
  p.settings.max_iters = 200;
  const auto res = minimize_action(model, p);
  CHECK(res.feasible);
  CHECK(res.action_value > 0.0);
  const auto eval = rate_function_eval(model, p.xi, res.h_star, p.target);
  CHECK(eval.action == doctest::Approx(res.action_value));
  CHECK(eval.gap == doctest::Approx(res.feasibility_gap).epsilon(1e-9));
}

TEST_CASE("weak convergence on the linear toy has slope one") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {1.0, 1.0});
  const auto noise = model_noise(Vec::Ones(2));
  IntegratorConfig cfg{1.0, 50, 0.0, 1, false};
  auto h = ControlPath::zeros(1.0, 1, 2);
  h.values << 0.5, -0.5;
  const auto rows = weak_convergence_experiment(ops, noise, cfg, Vec::Ones(2), &h,
                                                {1e-1, 1e-2, 1e-3, 1e-4}, 50, 3, 0);
  CHECK(loglog_slope(rows) == doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& r : rows) CHECK(r.blowups == 0);
}

TEST_CASE("compactness: oscillating controls converge weakly, trajectories strongly") {
  const auto b = testing::free_slip_basis(2);
  const Operators ops(b, {1.0, 1.0});
  const auto noise = model_noise(Vec::Ones(b.size()));
  IntegratorConfig cfg{1.0, 256, 0.0, 1, true};
  const auto h = ControlPath::zeros(1.0, 1, b.size());
  const Vec g = Vec::Ones(b.size());
  const auto rows = compactness_experiment(ops, noise, cfg, Vec::Zero(b.size()), h, g, 2.0, {4, 8, 16, 32, 64});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].distance < rows[i - 1].distance);
  CHECK(rows.back().distance < 0.25 * rows.front().distance);
}

TEST_CASE("Monte Carlo exit probability grows with the noise level") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {1.0, 1.0});
  const auto noise = model_noise(Vec::Ones(2));
  IntegratorConfig cfg{1.0, 50, 0.0, 1, false};
  const auto rows = mc_ldp_estimate(ops, noise, cfg, Vec::Zero(2), 0.5, {0.2, 0.05}, 400, 9, 0);
  CHECK(rows[0].hits > rows[1].hits);
  CHECK(rows[0].eps_log_p < 0.0);
  CHECK(rows[0].probability == doctest::Approx(rows[0].hits / 400.0));
}
