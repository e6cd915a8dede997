#include "benard/diagnostics.hpp"

#include <cmath>

#include "benard/norms.hpp"

namespace benard {

namespace {

constexpr double kSlack = 1e-10;  // relative round-off allowance for exact inequalities

bool exceeds(double lhs, double rhs) { return lhs > rhs * (1.0 + kSlack) + 1e-300; }

SpectralField scaled_random(const GalerkinBasis& basis, Rng& rng, int s) {
  static constexpr std::array<double, 4> decays{0.0, 0.5, 1.0, 2.0};
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  auto f = random_field(basis, rng, decays[s % decays.size()]);
  f.values() *= std::pow(10.0, expo(rng));
  return f;
}

// Quadrature Gram matrix of all modes, compared with the identity.
double gram_defect(const GalerkinBasis& basis) {
  SpectralWorkspace ws(basis);
  const int nz = basis.grid_x2(), nx = basis.grid_x1();
  const int nv = basis.velocity_size(), nt = basis.temperature_size();
  Eigen::VectorXd w(nz * nx);
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nz; ++i) w[j * nz + i] = basis.vertical().weights[i] * basis.x1_weight();
  const Eigen::VectorXd sw = w.cwiseSqrt();
  double defect = 0.0;
  if (nv > 0) {
    Eigen::MatrixXd m(2 * nz * nx, nv);
    VelocityGrids g;
    Vec e = Vec::Zero(nv);
    for (int k = 0; k < nv; ++k) {
      e.setZero();
      e[k] = 1.0;
      ws.synth_velocity(e, g, false);
      m.col(k).head(nz * nx) = Eigen::Map<const Vec>(g.u1.data(), nz * nx).cwiseProduct(sw);
      m.col(k).tail(nz * nx) = Eigen::Map<const Vec>(g.u2.data(), nz * nx).cwiseProduct(sw);
    }
    const Eigen::MatrixXd gram = m.transpose() * m;
    defect = std::max(defect, (gram - Eigen::MatrixXd::Identity(nv, nv)).cwiseAbs().maxCoeff());
  }
  if (nt > 0) {
    Eigen::MatrixXd m(nz * nx, nt);
    ScalarGrids g;
    Vec e = Vec::Zero(nt);
    for (int k = 0; k < nt; ++k) {
      e.setZero();
      e[k] = 1.0;
      ws.synth_scalar(e, g, false);
      m.col(k) = Eigen::Map<const Vec>(g.value.data(), nz * nx).cwiseProduct(sw);
    }
    const Eigen::MatrixXd gram = m.transpose() * m;
    defect = std::max(defect, (gram - Eigen::MatrixXd::Identity(nt, nt)).cwiseAbs().maxCoeff());
  }
  return defect;
}

}  // namespace

IdentityReport identity_suite(const Operators& ops, int samples, Rng& rng) {
  const auto& basis = ops.basis();
  const int nv = basis.velocity_size(), nt = basis.temperature_size(), n = basis.size();
  const auto& eig = basis.eigenvalues();
  OperatorWorkspace ws(basis);
  IdentityReport rep;
  rep.samples = samples;

  {
    VelocityGrids g;
    Vec e = Vec::Zero(nv);
    for (int k = 0; k < nv; ++k) {
      e.setZero();
      e[k] = 1.0;
      ws.spectral.synth_velocity(e, g, true);
      rep.divergence = std::max(rep.divergence, ws.spectral.integrate((g.d1u1 + g.d2u2).array().square().matrix()));
    }
  }
  rep.orthonormality = gram_defect(basis);

  Vec b(n), bphi(n), bpsi(n);
  for (int s = 0; s < samples; ++s) {
    const auto phi = scaled_random(basis, rng, s);
    const auto psi = scaled_random(basis, rng, s + 1);
    const auto chi = scaled_random(basis, rng, s + 2);
    const Vec u = phi.u(), th = phi.theta(), v = psi.u(), eta = psi.theta(), w = chi.u();
    const double nu_ = u.norm(), nuv = std::sqrt((eig.head(nv).array() * u.array().square()).sum());
    const double nth = th.norm(), nthv = std::sqrt((eig.tail(nt).array() * th.array().square()).sum());

    ops.apply_B(phi.values(), b, ws);
    if (nv > 0 && nu_ > 0.0)
      rep.b1_self = std::max(rep.b1_self, std::abs(b.head(nv).dot(u)) / (nu_ * nu_ * nuv));
    if (nt > 0 && nu_ > 0.0 && nth > 0.0)
      rep.b2_self = std::max(rep.b2_self, std::abs(b.tail(nt).dot(th)) / (nu_ * nth * nthv));

    if (nv > 0) {
      const double a1 = ops.pairing_b1(u, v, w, ws), a2 = ops.pairing_b1(u, w, v, ws);
      const double scale = nu_ * std::sqrt(v.squaredNorm() * w.squaredNorm()) *
                           std::sqrt(eig.head(nv).maxCoeff());
      if (scale > 0.0) rep.b1_antisym = std::max(rep.b1_antisym, std::abs(a1 + a2) / scale);
    }
    if (nv > 0 && nt > 0) {
      const double a1 = ops.pairing_b2(u, th, eta, ws), a2 = ops.pairing_b2(u, eta, th, ws);
      const double scale = nu_ * nth * eta.norm() * std::sqrt(eig.tail(nt).maxCoeff());
      if (scale > 0.0) rep.b2_antisym = std::max(rep.b2_antisym, std::abs(a1 + a2) / scale);
    }

    // <B(phi) - B(psi), Phi> = -<B1(U,U), v> - <B2(U,Theta), eta>
    ops.apply_B(phi.values(), bphi, ws);
    ops.apply_B(psi.values(), bpsi, ws);
    const Vec big = phi.values() - psi.values();
    const double lhs = (bphi - bpsi).dot(big);
    const Vec U = big.head(nv), Theta = big.tail(nt);
    double rhs = 0.0;
    if (nv > 0) rhs -= ops.pairing_b1(U, U, v, ws);
    if (nv > 0 && nt > 0) rhs -= ops.pairing_b2(U, Theta, eta, ws);
    const double vnorm = std::sqrt((eig.array() * big.array().square()).sum());
    const double scale = big.norm() * vnorm * std::sqrt(norm_V_sq(psi, basis)) + 1e-300;
    rep.diff_identity = std::max(rep.diff_identity, std::abs(lhs - rhs) / scale);

    const auto back = analyze(synth(phi, ws.spectral), ws.spectral);
    rep.parseval = std::max(rep.parseval, (back.values() - phi.values()).norm() / phi.values().norm());
  }
  return rep;
}

int InequalityReport::total_violations() const {
  int t = vl4 + poincare + inegB2 + normB1 + diffB1 + mono1;
  for (int i = 0; i < 3; ++i) t += bb1[i] + bb2[i];
  return t;
}

InequalityReport inequality_suite(const Operators& ops, int samples, Rng& rng) {
  const auto& basis = ops.basis();
  const int nv = basis.velocity_size(), nt = basis.temperature_size(), n = basis.size();
  const auto& eig = basis.eigenvalues();
  const Vec eig_u = eig.head(nv), eig_t = eig.tail(nt);
  OperatorWorkspace ws(basis);
  auto& sp = ws.spectral;
  const double nk = ops.params().nu_wedge_kappa();

  struct Sample {
    // |.|, ||.||, |.|_L4 of u, theta (phi), v, eta (psi), U, Theta (difference)
    std::array<double, 6> h, v, l4;
    double phi_h, phi_v, psi_h, psi_v, big_h, big_v;
    double b2, b1_dual, bb1, bb2, diff, mono;
  };
  std::vector<Sample> data(samples);
  auto vnorm = [](const Vec& x, const Vec& e) { return std::sqrt((e.array() * x.array().square()).sum()); };
  Vec b(n), bphi(n), bpsi(n), fphi(n), fpsi(n);
  for (int s = 0; s < samples; ++s) {
    const auto phi = scaled_random(basis, rng, s);
    const auto psi = scaled_random(basis, rng, s + 1);
    const Vec big = phi.values() - psi.values();
    const std::array<Vec, 6> parts{phi.u(), phi.theta(), psi.u(), psi.theta(), big.head(nv), big.tail(nt)};
    Sample& d = data[s];
    for (int i = 0; i < 6; ++i) {
      const bool vel = i % 2 == 0;
      d.h[i] = parts[i].norm();
      d.v[i] = vnorm(parts[i], vel ? eig_u : eig_t);
      d.l4[i] = vel ? (nv ? velocity_L4(parts[i], sp) : 0.0) : (nt ? temperature_L4(parts[i], sp) : 0.0);
    }
    d.phi_h = phi.values().norm();
    d.phi_v = vnorm(phi.values(), eig);
    d.psi_h = psi.values().norm();
    d.psi_v = vnorm(psi.values(), eig);
    d.big_h = big.norm();
    d.big_v = vnorm(big, eig);
    ops.apply_B(phi.values(), b, ws);
    d.b2 = nt ? ops.pairing_b2(parts[0], parts[1], parts[3], ws) : 0.0;  // <B2(u, theta), eta>
    d.b1_dual = nv ? dual_norm(b.head(nv), eig_u) : 0.0;                  // |B1(u,u)|_{V'}
    d.bb1 = nv ? b.head(nv).dot(parts[2]) : 0.0;                          // <B1(u,u), v>
    d.bb2 = nt ? b.tail(nt).dot(parts[3]) : 0.0;                          // <B2(phi), eta>
    ops.apply_B(psi.values(), bpsi, ws);
    d.diff = (b - bpsi).dot(big);
    ops.apply_F(phi.values(), fphi, ws);
    ops.apply_F(psi.values(), fpsi, ws);
    d.mono = (fphi - fpsi).dot(big) + nk * d.big_v * d.big_v;
  }

  InequalityReport rep;
  rep.samples = samples;
  rep.c2_hat = 1.0 / std::sqrt(basis.min_eigenvalue());
  for (const auto& d : data)
    for (int i = 0; i < 6; ++i)
      if (d.h[i] > 0.0) rep.c1_hat = std::max(rep.c1_hat, d.l4[i] * d.l4[i] / (d.h[i] * d.v[i]));
  const double c1 = rep.c1_hat;
  rep.c_diff = std::sqrt(2.0) * c1;

  for (const auto& d : data) {
    for (int i = 0; i < 6; ++i)
      if (exceeds(d.l4[i] * d.l4[i], c1 * d.h[i] * d.v[i])) ++rep.vl4;
    if (exceeds(d.phi_h, rep.c2_hat * d.phi_v)) ++rep.poincare;
    if (exceeds(d.psi_h, rep.c2_hat * d.psi_v)) ++rep.poincare;
    if (exceeds(std::abs(d.b2), d.l4[0] * d.l4[1] * d.v[3]) ||
        exceeds(d.l4[0] * d.l4[1] * d.v[3], c1 * d.phi_h * d.phi_v * d.v[3]))
      ++rep.inegB2;
    if (exceeds(d.b1_dual, d.l4[0] * d.l4[0]) || exceeds(d.l4[0] * d.l4[0], c1 * d.h[0] * d.v[0]))
      ++rep.normB1;
    for (int a = 0; a < 3; ++a) {
      const double al = rep.alphas[a];
      const double k = 27.0 * c1 * c1 / (256.0 * al * al * al);
      if (exceeds(std::abs(d.bb1), al * d.v[0] * d.v[0] + k * d.h[0] * d.h[0] * std::pow(d.l4[2], 4)))
        ++rep.bb1[a];
      if (exceeds(std::abs(d.bb2), al * d.phi_v * d.phi_v + k * d.h[0] * d.h[0] * std::pow(d.l4[3], 4)))
        ++rep.bb2[a];
    }
    const double base = d.big_h * d.big_v * d.psi_v;
    if (base > 0.0) rep.c_diff_observed = std::max(rep.c_diff_observed, std::abs(d.diff) / base);
    if (exceeds(std::abs(d.diff), rep.c_diff * base)) ++rep.diffB1;
    if (exceeds(d.mono, rep.c_diff * base + d.big_h * d.big_h)) ++rep.mono1;
  }
  return rep;
}

}  // namespace benard
