#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "benard/ensemble.hpp"
#include "benard/error.hpp"
#include "benard/integrators.hpp"
#include "benard/norms.hpp"
#include "test_support.hpp"

using namespace benard;
using testing::pi;

namespace {

NoiseModel additive(const Vec& lambdas) {
  return {CovarianceSpec::explicit_list(lambdas), DiffusionCoefficient::additive(1.0),
          DiffusionCoefficient::additive(1.0)};
}

Eigen::MatrixXd linear_generator(const Operators& ops) {
  const int n = ops.size();
  Eigen::MatrixXd M(n, n);
  Vec e(n), r(n), a(n);
  for (int j = 0; j < n; ++j) {
    e.setZero();
    e[j] = 1.0;
    ops.apply_A(e, a);
    ops.apply_R(e, r);
    M.col(j) = -(a + r);
  }
  return M;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("toy system: equal eigenvalues and a nonzero buoyancy coupling") {
  const auto b = testing::toy_basis();
  REQUIRE(b.size() == 2);
  CHECK(b.eigenvalues()[0] == doctest::Approx(1.5 * pi * pi));
  CHECK(b.eigenvalues()[1] == doctest::Approx(1.5 * pi * pi));
  const Operators ops(b, {1.0, 1.0});
  CHECK(std::abs(ops.coupling()(0, 0)) > 0.1);
}

TEST_CASE("skeleton reproduces the semi-implicit recursion") {
  const auto b = testing::free_slip_basis(2);
  const Operators ops(b, {0.5, 0.8});
  const auto noise = additive(Vec::Constant(b.size(), 0.1));
  IntegratorConfig cfg;
  cfg.horizon = 0.3;
  cfg.n_steps = 30;
  Rng rng = make_stream(1, 1);
  Vec xi(b.size());
  for (int i = 0; i < b.size(); ++i) xi[i] = standard_normal(rng);
  auto h = ControlPath::zeros(cfg.horizon, 3, b.size());
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < b.size(); ++i) h.values(k, i) = 0.1 * standard_normal(rng);
  const auto rec = run_skeleton(ops, noise, xi, &h, cfg);
  REQUIRE(rec.size() == 31);
  OperatorWorkspace ws(b);
  Vec phi = xi, bb(b.size()), r(b.size());
  const double dt = cfg.dt();
  for (int k = 0; k < cfg.n_steps; ++k) {
    ops.apply_B(phi, bb, ws);
    ops.apply_R(phi, r);
    const Vec rhs = phi + dt * (-bb - r + h.at(k / 10));
    phi = rhs.cwiseQuotient((Vec::Ones(b.size()) + dt * ops.a_diagonal()));
    CHECK((phi - rec.states[k + 1]).norm() <= 1e-13 * (1 + phi.norm()));
  }
}

TEST_CASE("linear skeleton converges to the matrix exponential at first order") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {1.0, 1.0});
  const auto noise = additive(Vec::Ones(2));
  const Eigen::MatrixXd M = linear_generator(ops);
  const Vec xi = Vec::Ones(2);
  const Vec exact = (M * 0.2).exp() * xi;
  std::vector<double> dts, errs;
  for (int n : {50, 100, 200, 400}) {
    IntegratorConfig cfg;
    cfg.horizon = 0.2;
    cfg.n_steps = n;
    cfg.nonlinear = false;
    cfg.record_stride = n;
    const auto rec = run_skeleton(ops, noise, xi, nullptr, cfg);
    dts.push_back(cfg.dt());
    errs.push_back((rec.states.back() - exact).norm());
  }
  CHECK(fit_slope(dts, errs) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("Ornstein-Uhlenbeck moments match the discrete Lyapunov recursion") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {0.1, 0.1});
  Vec lam(2);
  lam << 1.0, 0.5;
  const auto noise = additive(lam);
  IntegratorConfig cfg;
  cfg.horizon = 1.0;
  cfg.n_steps = 50;
  cfg.epsilon = 0.2;
  cfg.nonlinear = false;
  cfg.record_stride = 50;
  const Vec xi(Vec::Constant(2, 0.7));
  // phi_{k+1} = G phi_k + sqrt(eps) D dW,  G = D (I - dt R),  D = (I + dt A)^{-1}
  const double dt = cfg.dt();
  Eigen::MatrixXd R(2, 2);
  Vec e(2), col(2);
  for (int j = 0; j < 2; ++j) {
    e.setZero();
    e[j] = 1.0;
    ops.apply_R(e, col);
    R.col(j) = col;
  }
  const Eigen::MatrixXd D = (Vec::Ones(2) + dt * ops.a_diagonal()).cwiseInverse().asDiagonal();
  const Eigen::MatrixXd G = D * (Eigen::MatrixXd::Identity(2, 2) - dt * R);
  Vec mean = xi;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  for (int k = 0; k < cfg.n_steps; ++k) {
    mean = G * mean;
    cov = G * cov * G.transpose() + cfg.epsilon * dt * D * lam.asDiagonal() * D;
  }
  const int paths = 4000;
  const auto finals = map_paths<Vec>(paths, 99, 0, [&](int, Rng& rng) {
    return run_stochastic(ops, noise, xi, nullptr, cfg, rng).states.back();
  });
  Vec m = Vec::Zero(2);
  for (const auto& f : finals) m += f;
  m /= paths;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& f : finals) c += (f - m) * (f - m).transpose();
  c /= paths - 1;
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(m[i] - mean[i]) < 4.0 * std::sqrt(cov(i, i) / paths));
    CHECK(c(i, i) == doctest::Approx(cov(i, i)).epsilon(4.0 * std::sqrt(2.0 / paths)));
  }
  CHECK(std::abs(c(0, 1) - cov(0, 1)) < 4.0 * std::sqrt((cov(0, 0) * cov(1, 1) + cov(0, 1) * cov(0, 1)) / paths));
}

TEST_CASE("strong error against a fine reference driven by the same increments") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {1.0, 1.0});
  Vec lam(2);
  lam << 1.0, 1.0;
  const auto noise = additive(lam);
  const double T = 0.5;
  const int fine = 4096;
  const std::vector<int> coarse{32, 64, 128, 256};
  std::vector<double> err(coarse.size(), 0.0), dts;
  for (int n : coarse) dts.push_back(T / n);
  const int paths = 40;
  for (int p = 0; p < paths; ++p) {
    Rng rng = make_stream(7, p);
    std::vector<Vec> dw(fine, Vec(2));
    for (auto& w : dw) sample_wiener_increment(noise.q, T / fine, rng, w);
    auto solve = [&](int n) {
      IntegratorConfig cfg;
      cfg.horizon = T;
      cfg.n_steps = n;
      cfg.epsilon = 1.0;
      cfg.nonlinear = false;
      const Stepper st(ops, noise, cfg);
      OperatorWorkspace ws(b);
      Vec phi = Vec::Ones(2), next(2);
      const int agg = fine / n;
      for (int k = 0; k < n; ++k) {
        Vec w = Vec::Zero(2);
        for (int j = 0; j < agg; ++j) w += dw[k * agg + j];
        st.step(phi, nullptr, &w, next, ws);
        phi = next;
      }
      return phi;
    };
    const Vec ref = solve(fine);
    for (std::size_t i = 0; i < coarse.size(); ++i) err[i] += (solve(coarse[i]) - ref).norm() / paths;
  }
  CHECK(fit_slope(dts, err) >= 0.5);
}

TEST_CASE("zero noise makes the stochastic run independent of the seed") {
  const auto b = testing::free_slip_basis(2);
  const Operators ops(b, {1.0, 1.0});
  const auto noise = additive(Vec::Constant(b.size(), 0.5));
  IntegratorConfig cfg;
  cfg.n_steps = 40;
  Vec xi = Vec::LinSpaced(b.size(), -1, 1);
  Rng r1 = make_stream(1, 0), r2 = make_stream(2, 0);
  const auto a = run_stochastic(ops, noise, xi, nullptr, cfg, r1);
  const auto c = run_stochastic(ops, noise, xi, nullptr, cfg, r2);
  for (int i = 0; i < a.size(); ++i) CHECK(a.states[i] == c.states[i]);
  CHECK(x_distance(a, c) == 0.0);
}

TEST_CASE("energy balance residual decays at first order") {
  const auto b = testing::free_slip_basis(3);
  const Operators ops(b, {1.0, 1.0});
  const auto noise = additive(Vec::Ones(b.size()));
  // smooth datum (coefficients ~ lambda^{-3/2}); rough data are pre-asymptotic at these dt
  Rng rng = make_stream(4, 0);
  const auto f = random_field(b, rng, 3.0);
  const Vec xi = f.values() * (3.0 / f.values().norm());
  std::vector<double> dts, res;
  for (int n : {100, 200, 400}) {
    IntegratorConfig cfg;
    cfg.horizon = 1.0;
    cfg.n_steps = n;
    const auto rec = run_skeleton(ops, noise, xi, nullptr, cfg);
    dts.push_back(cfg.dt());
    res.push_back(energy_balance_residual(rec, ops, cfg.dt()));
  }
  CHECK(fit_slope(dts, res) >= 0.9);
}

TEST_CASE("Galerkin truncations converge under refinement") {
  // same smooth data on cutoffs 2, 4, 8, 16; compare neighbours on the coarser labels
  std::vector<GalerkinBasis> bases;
  std::vector<TrajectoryRecord> recs;
  IntegratorConfig cfg;
  cfg.horizon = 0.2;
  cfg.n_steps = 40;
  for (int k : {2, 4, 8, 16}) {
    bases.push_back(testing::free_slip_basis(k));
    const auto& b = bases.back();
    const Operators ops(b, {0.1, 0.1});
    const auto noise = additive(Vec::Ones(b.size()));
    Vec xi = Vec::Zero(b.size());
    xi[b.find_velocity({1, 1})] = 3.0;
    xi[b.find_velocity({-2, 1})] = 2.0;
    xi[b.find_temperature({-1, 1})] = 2.0;
    xi[b.find_temperature({2, 2})] = 1.0;
    recs.push_back(run_skeleton(ops, noise, xi, nullptr, cfg));
  }
  auto embed = [&](const TrajectoryRecord& r, const GalerkinBasis& from, const GalerkinBasis& to) {
    TrajectoryRecord out = r;
    out.eigenvalues = to.eigenvalues();
    for (auto& s : out.states) {
      Vec big = Vec::Zero(to.size());
      for (int i = 0; i < from.velocity_size(); ++i) big[to.find_velocity(from.velocity().labels[i])] = s[i];
      for (int j = 0; j < from.temperature_size(); ++j)
        big[to.velocity_size() + to.find_temperature(from.temperature().labels[j])] = s[from.velocity_size() + j];
      s = big;
    }
    return out;
  };
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < bases.size(); ++i)
    d.push_back(x_distance(embed(recs[i], bases[i], bases[i + 1]), recs[i + 1]));
  MESSAGE("distances " << d[0] << " " << d[1] << " " << d[2]);
  CHECK(d[0] > d[1]);
  CHECK(d[1] > d[2]);
}

TEST_CASE("records: stride, endpoints and monitors") {
  const auto b = testing::toy_basis();
  const Operators ops(b, {1.0, 1.0});
  const auto noise = additive(Vec::Ones(2));
  IntegratorConfig cfg;
  cfg.horizon = 1.0;
  cfg.n_steps = 10;
  cfg.record_stride = 4;
  const auto rec = run_skeleton(ops, noise, Vec::Ones(2), nullptr, cfg);
  REQUIRE(rec.size() == 4);
  CHECK(rec.times[0] == 0.0);
  CHECK(rec.times[1] == doctest::Approx(0.4));
  CHECK(rec.times.back() == doctest::Approx(1.0));
  for (int i = 0; i < rec.size(); ++i) {
    CHECK(rec.h_sq[i] == doctest::Approx(rec.states[i].squaredNorm()));
    CHECK(rec.v_sq[i] == doctest::Approx((b.eigenvalues().array() * rec.states[i].array().square()).sum()));
  }
  CHECK(rec.sup_h_sq.back() == doctest::Approx(2.0));  // decaying: the sup is at t = 0
  // the integral monitor uses every step, not just records
  cfg.record_stride = 1;
  const auto all = run_skeleton(ops, noise, Vec::Ones(2), nullptr, cfg);
  double integral = 0;
  for (int i = 1; i < all.size(); ++i) integral += all.v_sq[i] * 0.1;
  CHECK(rec.int_v_sq.back() == doctest::Approx(integral).epsilon(1e-12));
  CHECK(x_norm(all) == doctest::Approx(std::sqrt(2.0 + integral)));
  CHECK_THROWS_AS((IntegratorConfig{1.0, 0, 0.0, 1, true}.validate()), ConfigError);
  CHECK_THROWS_AS((IntegratorConfig{1.0, 10, -1.0, 1, true}.validate()), ConfigError);
}

TEST_CASE("a diverging state is reported with its step") {
  const auto b = testing::free_slip_basis(3);
  const Operators ops(b, {1e-3, 1e-3});
  const auto noise = additive(Vec::Ones(b.size()));
  IntegratorConfig cfg;
  cfg.horizon = 100.0;
  cfg.n_steps = 100;
  Vec xi = Vec::Constant(b.size(), 1e3);
  bool thrown = false;
  try {
    run_skeleton(ops, noise, xi, nullptr, cfg);
  } catch (const BlowUpError& e) {
    thrown = true;
    CHECK(e.step() > 0);
    CHECK(e.step() <= 100);
  }
  CHECK(thrown);
}

TEST_CASE("dyadic increments of a linear ramp match the closed form") {
  // phi(t) = t e on a grid of m = 64 intervals of [0, 1]: each cell of p points
  // contributes dt^3 sum_{i=1}^{p} i^2.
  TrajectoryRecord rec;
  const int m = 64;
  const double dt = 1.0 / m;
  for (int k = 0; k <= m; ++k) {
    rec.times.push_back(k * dt);
    rec.states.push_back(Vec::Constant(1, k * dt));
    rec.h_sq.push_back(k * dt * k * dt);
    rec.sup_h_sq.push_back(k * dt * k * dt);
    rec.int_v_sq.push_back(0.0);
  }
  for (int n = 1; n <= 6; ++n) {
    const double p = static_cast<double>(m >> n);
    const double expected = (1 << n) * dt * dt * dt * p * (p + 1) * (2 * p + 1) / 6.0;
    CHECK(dyadic_increment(rec, n) == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK_THROWS_AS(dyadic_increment(rec, 7), ConfigError);
  // paths outside G_N count as zero but stay in the denominator
  auto big = rec;
  big.sup_h_sq.back() = 10.0;
  const auto stat = dyadic_increment_statistic({rec, big}, 2, 5.0);
  CHECK(stat[1].paths_in_G_N == 1);
  CHECK(stat[1].mean == doctest::Approx(dyadic_increment(rec, 2) / 2.0));
  CHECK(rec.gN_flags(0.5)[32] == true);
  CHECK(rec.gN_flags(0.5)[64] == false);
}

TEST_CASE("control rows map onto the integrator grid") {
  const auto h = ControlPath::zeros(1.0, 4, 2);
  CHECK(control_row(h, 16, 0) == 0);
  CHECK(control_row(h, 16, 5) == 1);
  CHECK(control_row(h, 16, 15) == 3);
  CHECK_THROWS_AS(control_row(h, 10, 0), ConfigError);
}
