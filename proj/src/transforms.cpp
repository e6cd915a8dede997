#include "benard/transforms.hpp"

#include <fmt/format.h>

#include "benard/error.hpp"

namespace benard {

void SpectralField::check(const GalerkinBasis& basis) const {
  if (n_vel_ != basis.velocity_size() || temperature_size() != basis.temperature_size())
    throw ShapeError(fmt::format("field blocks ({}, {}) do not match basis ({}, {})", n_vel_,
                                 temperature_size(), basis.velocity_size(),
                                 basis.temperature_size()));
}

SpectralWorkspace::SpectralWorkspace(const GalerkinBasis& basis) : basis_(&basis) {
  weighted_table_t_ = (basis.x1_table() * basis.x1_weight()).transpose();
  const auto& w = basis.vertical().weights;
  wz_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

void SpectralWorkspace::synth_velocity(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                       VelocityGrids& out, bool gradients) {
  const auto& modes = basis_->velocity();
  if (coeffs.size() != modes.size()) throw ShapeError("synth_velocity: coefficient length mismatch");
  const int nz = basis_->grid_x2();
  const int ncol = 2 * basis_->harmonic_count();
  h1_.setZero(nz, ncol);
  h2_.setZero(nz, ncol);
  if (gradients) {
    h1z_.setZero(nz, ncol);
    h2z_.setZero(nz, ncol);
  }
  for (int i = 0; i < modes.size(); ++i) {
    const double c = coeffs[i];
    if (c == 0.0) continue;
    const int col = 2 * modes.harmonic[i] + modes.parity[i];
    const int col2 = 2 * modes.harmonic[i] + 1 - modes.parity[i];
    h1_.col(col) += c * modes.profile1.col(i);
    h2_.col(col2) += c * modes.profile2.col(i);
    if (gradients) {
      h1z_.col(col) += c * modes.dz_profile1.col(i);
      h2z_.col(col2) += c * modes.dz_profile2.col(i);
    }
  }
  const auto& t = basis_->x1_table();
  out.u1.noalias() = h1_ * t;
  out.u2.noalias() = h2_ * t;
  if (gradients) {
    const auto& tx = basis_->x1_derivative_table();
    out.d1u1.noalias() = h1_ * tx;
    out.d2u1.noalias() = h1z_ * t;
    out.d1u2.noalias() = h2_ * tx;
    out.d2u2.noalias() = h2z_ * t;
  }
}

void SpectralWorkspace::synth_scalar(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                     ScalarGrids& out, bool gradients) {
  const auto& modes = basis_->temperature();
  if (coeffs.size() != modes.size()) throw ShapeError("synth_scalar: coefficient length mismatch");
  const int nz = basis_->grid_x2();
  const int ncol = 2 * basis_->harmonic_count();
  h1_.setZero(nz, ncol);
  if (gradients) h1z_.setZero(nz, ncol);
  for (int i = 0; i < modes.size(); ++i) {
    const double c = coeffs[i];
    if (c == 0.0) continue;
    const int col = 2 * modes.harmonic[i] + modes.parity[i];
    h1_.col(col) += c * modes.profile1.col(i);
    if (gradients) h1z_.col(col) += c * modes.dz_profile1.col(i);
  }
  const auto& t = basis_->x1_table();
  out.value.noalias() = h1_ * t;
  if (gradients) {
    out.d1.noalias() = h1_ * basis_->x1_derivative_table();
    out.d2.noalias() = h1z_ * t;
  }
}

void SpectralWorkspace::moments(const Eigen::MatrixXd& g, Eigen::MatrixXd& out) {
  if (g.rows() != basis_->grid_x2() || g.cols() != basis_->grid_x1())
    throw ShapeError("grid function shape does not match the basis grid");
  out.noalias() = g * weighted_table_t_;
  out = wz_.asDiagonal() * out;
}

void SpectralWorkspace::project_velocity(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2,
                                         Eigen::Ref<Eigen::VectorXd> out) {
  const auto& modes = basis_->velocity();
  if (out.size() != modes.size()) throw ShapeError("project_velocity: output length mismatch");
  moments(g1, m1_);
  moments(g2, m2_);
  for (int i = 0; i < modes.size(); ++i) {
    const int col = 2 * modes.harmonic[i] + modes.parity[i];
    const int col2 = 2 * modes.harmonic[i] + 1 - modes.parity[i];
    out[i] = m1_.col(col).dot(modes.profile1.col(i)) + m2_.col(col2).dot(modes.profile2.col(i));
  }
}

void SpectralWorkspace::project_scalar(const Eigen::MatrixXd& g, Eigen::Ref<Eigen::VectorXd> out) {
  const auto& modes = basis_->temperature();
  if (out.size() != modes.size()) throw ShapeError("project_scalar: output length mismatch");
  moments(g, m1_);
  for (int i = 0; i < modes.size(); ++i) {
    const int col = 2 * modes.harmonic[i] + modes.parity[i];
    out[i] = m1_.col(col).dot(modes.profile1.col(i));
  }
}

double SpectralWorkspace::integrate(const Eigen::MatrixXd& g) const {
  return (wz_.transpose() * g).sum() * basis_->x1_weight();
}

PhysicalField synth(const SpectralField& field, SpectralWorkspace& ws) {
  field.check(ws.basis());
  VelocityGrids v;
  ScalarGrids s;
  ws.synth_velocity(field.u(), v, false);
  ws.synth_scalar(field.theta(), s, false);
  return {std::move(v.u1), std::move(v.u2), std::move(s.value)};
}

SpectralField analyze(const PhysicalField& physical, SpectralWorkspace& ws) {
  const auto& basis = ws.basis();
  SpectralField out = SpectralField::zeros(basis);
  ws.project_velocity(physical.u1, physical.u2, out.u());
  ws.project_scalar(physical.theta, out.theta());
  return out;
}

}  // namespace benard
