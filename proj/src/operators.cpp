#include "benard/operators.hpp"

#include <cmath>

#include "benard/error.hpp"

namespace benard {

void PhysicsParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("physics.nu must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("physics.kappa must be positive");
}

Operators::Operators(const GalerkinBasis& basis, PhysicsParams params)
    : basis_(&basis), params_(params) {
  params_.validate();
  const int nv = basis.velocity_size();
  const int nt = basis.temperature_size();
  a_diag_.resize(basis.size());
  a_diag_.head(nv) = params_.nu * basis.velocity().eigenvalues;
  a_diag_.tail(nt) = params_.kappa * basis.temperature().eigenvalues;

  // Buoyancy coupling, one temperature mode at a time through the grid.
  coupling_.setZero(nv, nt);
  if (nv == 0 || nt == 0) return;
  SpectralWorkspace ws(basis);
  ScalarGrids s;
  Vec e = Vec::Zero(nt);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(basis.grid_x2(), basis.grid_x1());
  for (int j = 0; j < nt; ++j) {
    e.setZero();
    e[j] = 1.0;
    ws.synth_scalar(e, s, false);
    ws.project_velocity(zero, s.value, coupling_.col(j));
  }
}

void Operators::apply_A(const CVecRef& phi, VecRef out) const {
  out = a_diag_.cwiseProduct(phi);
}

void Operators::apply_R(const CVecRef& phi, VecRef out) const {
  const int nv = velocity_size();
  const int nt = size() - nv;
  out.head(nv).noalias() = -coupling_ * phi.tail(nt);
  out.tail(nt).noalias() = -coupling_.transpose() * phi.head(nv);
}

void Operators::advect(const CVecRef& carrier, const CVecRef& target, VecRef out,
                       OperatorWorkspace& ws) const {
  const int nv = velocity_size();
  const int nt = size() - nv;
  auto& sp = ws.spectral;
  sp.synth_velocity(carrier.head(nv), ws.carrier, false);
  const auto& a = ws.carrier;
  if (nv > 0) {
    sp.synth_velocity(target.head(nv), ws.target, true);
    const auto& t = ws.target;
    ws.g1 = a.u1.cwiseProduct(t.d1u1) + a.u2.cwiseProduct(t.d2u1);
    ws.g2 = a.u1.cwiseProduct(t.d1u2) + a.u2.cwiseProduct(t.d2u2);
    sp.project_velocity(ws.g1, ws.g2, out.head(nv));
  }
  if (nt > 0) {
    if (nv == 0) {
      out.tail(nt).setZero();
      return;
    }
    sp.synth_scalar(target.tail(nt), ws.scalar, true);
    ws.g3 = a.u1.cwiseProduct(ws.scalar.d1) + a.u2.cwiseProduct(ws.scalar.d2);
    sp.project_scalar(ws.g3, out.tail(nt));
  }
}

void Operators::apply_B(const CVecRef& phi, VecRef out, OperatorWorkspace& ws) const {
  advect(phi, phi, out, ws);
}

void Operators::apply_F(const CVecRef& phi, VecRef out, OperatorWorkspace& ws) const {
  apply_B(phi, out, ws);
  Vec r(size());
  apply_R(phi, r);
  out = -(out + r + a_diag_.cwiseProduct(phi));
}

// dB(phi) d = advect(d, phi) + advect(phi, d). The first term pairs with p as
// int d . [(grad v)^T p_u + p_theta grad eta]; the second is antisymmetric in its
// target slot because the carrier is divergence free and tangent to the walls.
void Operators::apply_B_jacobian_transpose(const CVecRef& phi, const CVecRef& p, VecRef out,
                                           OperatorWorkspace& ws) const {
  const int nv = velocity_size();
  const int nt = size() - nv;
  advect(phi, p, out, ws);
  out = -out;
  if (nv == 0) return;
  auto& sp = ws.spectral;
  sp.synth_velocity(phi.head(nv), ws.target, true);
  sp.synth_velocity(p.head(nv), ws.carrier, false);
  const auto& g = ws.target;
  const auto& q = ws.carrier;
  ws.g1 = g.d1u1.cwiseProduct(q.u1) + g.d1u2.cwiseProduct(q.u2);
  ws.g2 = g.d2u1.cwiseProduct(q.u1) + g.d2u2.cwiseProduct(q.u2);
  if (nt > 0) {
    ScalarGrids pt;
    sp.synth_scalar(p.tail(nt), pt, false);
    sp.synth_scalar(phi.tail(nt), ws.scalar, true);
    ws.g1 += pt.value.cwiseProduct(ws.scalar.d1);
    ws.g2 += pt.value.cwiseProduct(ws.scalar.d2);
  }
  Vec extra(nv);
  sp.project_velocity(ws.g1, ws.g2, extra);
  out.head(nv) += extra;
}

double Operators::pairing_b1(const CVecRef& u, const CVecRef& v, const CVecRef& w,
                             OperatorWorkspace& ws) const {
  const int nv = velocity_size();
  Vec carrier = Vec::Zero(size()), target = Vec::Zero(size()), out(size());
  carrier.head(nv) = u;
  target.head(nv) = v;
  advect(carrier, target, out, ws);
  return out.head(nv).dot(w);
}

double Operators::pairing_b2(const CVecRef& u, const CVecRef& theta, const CVecRef& eta,
                             OperatorWorkspace& ws) const {
  const int nv = velocity_size();
  const int nt = size() - nv;
  Vec carrier = Vec::Zero(size()), target = Vec::Zero(size()), out(size());
  carrier.head(nv) = u;
  target.tail(nt) = theta;
  advect(carrier, target, out, ws);
  return out.tail(nt).dot(eta);
}

SpectralField Operators::apply_A(const SpectralField& f) const {
  f.check(*basis_);
  SpectralField out = SpectralField::zeros(*basis_);
  apply_A(f.values(), out.values());
  return out;
}

SpectralField Operators::apply_R(const SpectralField& f) const {
  f.check(*basis_);
  SpectralField out = SpectralField::zeros(*basis_);
  apply_R(f.values(), out.values());
  return out;
}

SpectralField Operators::apply_B(const SpectralField& f, OperatorWorkspace& ws) const {
  f.check(*basis_);
  SpectralField out = SpectralField::zeros(*basis_);
  apply_B(f.values(), out.values(), ws);
  return out;
}

SpectralField Operators::apply_F(const SpectralField& f, OperatorWorkspace& ws) const {
  f.check(*basis_);
  SpectralField out = SpectralField::zeros(*basis_);
  apply_F(f.values(), out.values(), ws);
  return out;
}

double dual_norm(const CVecRef& coeffs, const CVecRef& eigenvalues) {
  return std::sqrt((coeffs.array().square() / eigenvalues.array()).sum());
}

}  // namespace benard
