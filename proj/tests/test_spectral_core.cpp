#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "benard/basis.hpp"
#include "benard/basis_io.hpp"
#include "benard/error.hpp"
#include "benard/norms.hpp"
#include "benard/quadrature.hpp"
#include "benard/transforms.hpp"
#include "test_support.hpp"

using namespace benard;
using testing::pi;

namespace {

GalerkinBasis free_slip(int k1, int k2, int modes, double l = 2.0) {
  Domain d;
  d.length = l;
  BasisSpec s;
  s.max_k1 = k1;
  s.max_k2 = k2;
  s.velocity_modes = modes;
  return GalerkinBasis::build(d, s);
}

GalerkinBasis no_slip(int k1, int modes) {
  Domain d;
  d.length = 2.0;
  BasisSpec s;
  s.max_k1 = k1;
  s.max_k2 = modes;
  s.velocity_modes = modes;
  s.bc = BoundaryMode::NoSlip;
  return GalerkinBasis::build(d, s);
}

}  // namespace

TEST_CASE("quadrature rules integrate their exactness classes") {
  const auto gl = VerticalQuadrature::gauss_legendre(6);
  for (int p = 0; p <= 11; ++p) {
    double s = 0;
    for (int i = 0; i < gl.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], p);
    CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
  }
  const auto tr = VerticalQuadrature::trapezoid(8);
  CHECK(tr.size() == 9);
  for (int m = 1; m < 16; ++m) {
    double s = 0;
    for (int i = 0; i < tr.size(); ++i) s += tr.weights[i] * std::cos(pi * m * tr.nodes[i]);
    CHECK(std::abs(s) < 1e-14);
  }
}

TEST_CASE("free-slip eigenvalues match the closed forms") {
  const double l = 2.0 * std::sqrt(2.0);
  const auto b = free_slip(3, 3, 3, l);
  const testing::FreeSlip fs{l};
  for (int i = 0; i < b.velocity_size(); ++i)
    CHECK(b.velocity().eigenvalues[i] ==
          doctest::Approx(fs.velocity_eigenvalue(b.velocity().labels[i])).epsilon(1e-13));
  for (int j = 0; j < b.temperature_size(); ++j)
    CHECK(b.temperature().eigenvalues[j] ==
          doctest::Approx(fs.temperature_eigenvalue(b.temperature().labels[j])).epsilon(1e-13));
  // sizes: (2 k1 + 1) horizontal functions times the vertical modes
  CHECK(b.temperature_size() == 7 * 3);
  CHECK(b.velocity_size() == 7 * 3);
  CHECK(b.min_eigenvalue() == doctest::Approx(pi * pi));
}

TEST_CASE("ordering is ascending with the documented tie break") {
  const auto b = free_slip(4, 4, 4);
  const auto& v = b.velocity();
  for (int i = 1; i < v.size(); ++i) {
    const double a = v.eigenvalues[i - 1], c = v.eigenvalues[i];
    REQUIRE(a <= c + 1e-12);
    if (std::abs(a - c) < 1e-12) {
      const auto p = v.labels[i - 1], q = v.labels[i];
      const bool ok = std::abs(p.k1) < std::abs(q.k1) ||
                      (std::abs(p.k1) == std::abs(q.k1) && (p.k1 > q.k1 || (p.k1 == q.k1 && p.index < q.index)));
      CHECK(ok);
    }
  }
  // nesting: a smaller cutoff is a prefix of the same labels in the same relative order
  const auto small = free_slip(2, 2, 2);
  int last = -1;
  for (const auto& lab : small.temperature().labels) {
    const int at = b.find_temperature(lab);
    CHECK(at > last);
    last = at;
  }
}

TEST_CASE("synthesised free-slip modes agree with the analytic functions on the grid") {
  const double l = 3.0;
  const auto b = free_slip(3, 3, 3, l);
  const testing::FreeSlip fs{l};
  SpectralWorkspace ws(b);
  double worst = 0.0;
  for (int k = 0; k < b.size(); ++k) {
    SpectralField f = SpectralField::zeros(b);
    f.values()[k] = 1.0;
    const auto g = synth(f, ws);
    for (int i = 0; i < b.grid_x2(); ++i)
      for (int j = 0; j < b.grid_x1(); ++j) {
        const auto p = fs.evaluate(b, f.values(), b.x1_node(j), b.vertical().nodes[i]);
        worst = std::max({worst, std::abs(g.u1(i, j) - p.u1), std::abs(g.u2(i, j) - p.u2),
                          std::abs(g.theta(i, j) - p.th)});
      }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Parseval round trip and divergence for every mode") {
  for (auto bc : {BoundaryMode::FreeSlip, BoundaryMode::NoSlip}) {
    const auto b = bc == BoundaryMode::FreeSlip ? free_slip(4, 4, 4) : no_slip(3, 4);
    SpectralWorkspace ws(b);
    Rng rng = make_stream(1, 2);
    for (int s = 0; s < 20; ++s) {
      const auto f = random_field(b, rng, 0.5 * (s % 4));
      const auto back = analyze(synth(f, ws), ws);
      CHECK((back.values() - f.values()).norm() / f.values().norm() < 1e-10);
    }
    VelocityGrids g;
    const double tol = bc == BoundaryMode::FreeSlip ? 1e-16 : 1e-8;
    for (int i = 0; i < b.velocity_size(); ++i) {
      Vec c = Vec::Zero(b.velocity_size());
      c[i] = 1.0;
      ws.synth_velocity(c, g, true);
      const Eigen::MatrixXd div = g.d1u1 + g.d2u2;
      CHECK(ws.integrate(div.cwiseProduct(div)) <= tol);
    }
  }
}

TEST_CASE("no-slip eigenvalues satisfy the channel characteristic equations") {
  // (D^2 - a^2)^2 f = lambda (a^2 - D^2) f with f = f' = 0: beta^2 = lambda - a^2 and
  // even modes beta tan(beta/2) = -a tanh(a/2), odd modes beta cot(beta/2) = a coth(a/2).
  for (double a : {0.5, 2.0, 5.0}) {
    const auto ce = solve_channel_stokes(a, 4, 0 + 40);
    for (int k = 0; k < 4; ++k) {
      const double beta = std::sqrt(ce.eigenvalues[k] - a * a);
      const double even = beta * std::sin(beta / 2) * std::cosh(a / 2) + a * std::sinh(a / 2) * std::cos(beta / 2);
      const double odd = beta * std::cos(beta / 2) * std::sinh(a / 2) - a * std::cosh(a / 2) * std::sin(beta / 2);
      const double scale = beta * std::cosh(a / 2) + a * std::cosh(a / 2);
      CHECK(std::min(std::abs(even), std::abs(odd)) / scale < 1e-8);
    }
    // lowest even root is near 2 pi + small: first eigenvalue > (2 pi)^2 ... sanity ordering
    for (int k = 1; k < 4; ++k) CHECK(ce.eigenvalues[k] > ce.eigenvalues[k - 1]);
  }
}

TEST_CASE("no-slip velocity vanishes on the walls") {
  const auto b = no_slip(2, 3);
  const auto& v = b.velocity();
  const auto ce = solve_channel_stokes(1.0, 3, 30);
  std::vector<double> z{0.0, 1.0};
  Eigen::VectorXd f, df, ddf;
  for (int k = 0; k < 3; ++k) {
    ce.evaluate(k, z, f, df, ddf);
    CHECK(f.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(df.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(v.size() == 5 * 3);
}

TEST_CASE("L4 norms of single modes match the closed forms") {
  const double l = 2.5;
  const auto b = free_slip(2, 2, 2, l);
  SpectralWorkspace ws(b);
  Vec th = Vec::Zero(b.temperature_size());
  th[b.find_temperature({0, 1})] = 1.0;
  // sqrt(2/l)... k1 = 0: (1/l) 4 int sin^4 = 3 / (2 l)
  CHECK(std::pow(temperature_L4(th, ws), 4) == doctest::Approx(1.5 / l).epsilon(1e-12));
  th.setZero();
  th[b.find_temperature({1, 1})] = 1.0;
  // (4 / l^2) (3 l / 8) * 4 (3 / 8) = 9 / (4 l)
  CHECK(std::pow(temperature_L4(th, ws), 4) == doctest::Approx(2.25 / l).epsilon(1e-12));
  // shear velocity mode sqrt(2/l) cos(pi z) in u1
  Vec u = Vec::Zero(b.velocity_size());
  u[b.find_velocity({0, 1})] = 1.0;
  CHECK(std::pow(velocity_L4(u, ws), 4) == doctest::Approx(1.5 / l).epsilon(1e-12));
}

TEST_CASE("Ladyzhenskaya and Poincare hold sample-wise with the run's constants") {
  const auto b = free_slip(4, 4, 4);
  SpectralWorkspace ws(b);
  Rng rng = make_stream(3, 0);
  const auto c = estimate_constants(b, 200, rng);
  CHECK(c.c2_hat == doctest::Approx(1.0 / pi));
  CHECK(c.c1_hat > 0.0);
  for (int s = 0; s < 200; ++s) {
    const auto f = random_field(b, rng, 0.5 * (s % 5));
    CHECK(norm_H(f) * norm_H(f) <= c.c2_hat * c.c2_hat * norm_V_sq(f, b) * (1 + 1e-12));
  }
  // ratio |th|_L4^2 / (|th| ||th||) of the lowest temperature mode: sqrt(3 / (2 l)) / pi
  Vec th = Vec::Zero(b.temperature_size());
  th[b.find_temperature({0, 1})] = 1.0;
  CHECK(temperature_l4_ratio(th, ws) == doctest::Approx(std::sqrt(1.5 / 2.0) / pi).epsilon(1e-12));
}

TEST_CASE("basis cache and snapshot files round trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "benard_io_test";
  fs::create_directories(dir);
  for (auto bc : {BoundaryMode::FreeSlip, BoundaryMode::NoSlip}) {
    const auto b = bc == BoundaryMode::FreeSlip ? free_slip(3, 2, 2) : no_slip(2, 3);
    const auto path = (dir / "basis.bnrd").string();
    save_basis(b, path);
    const auto r = load_basis(path);
    CHECK(r.size() == b.size());
    CHECK(r.grid_x1() == b.grid_x1());
    CHECK(r.grid_x2() == b.grid_x2());
    CHECK((r.eigenvalues() - b.eigenvalues()).norm() == 0.0);
    CHECK((r.velocity().profile2 - b.velocity().profile2).norm() == 0.0);
    CHECK((r.temperature().dz_profile1 - b.temperature().dz_profile1).norm() == 0.0);
    for (int i = 0; i < b.velocity_size(); ++i) CHECK(r.velocity().labels[i] == b.velocity().labels[i]);
    const auto c = cached_basis(b.domain(), b.spec(), path);
    CHECK((c.x1_table() - b.x1_table()).norm() == 0.0);
  }
  Snapshots s;
  s.velocity_size = 3;
  s.temperature_size = 2;
  s.times = {0.0, 0.5};
  s.states = {Vec::LinSpaced(5, 0, 1), Vec::LinSpaced(5, -1, 2)};
  const auto path = (dir / "snap.bnrd").string();
  save_snapshots(s, path);
  const auto r = load_snapshots(path);
  CHECK(r.times == s.times);
  CHECK(r.states[1] == s.states[1]);
  CHECK_THROWS(load_basis(path));  // wrong kind
  {
    std::ofstream(path, std::ios::binary) << "JUNKJUNKJUNK";
  }
  CHECK_THROWS(load_snapshots(path));
  fs::remove_all(dir);
}
