#pragma once

#include <Eigen/Dense>

#include "benard/field.hpp"
#include "benard/transforms.hpp"

namespace benard {

struct PhysicsParams {
  double nu = 1.0;
  double kappa = 1.0;
  double nu_wedge_kappa() const { return nu < kappa ? nu : kappa; }
  /// Throws ConfigError unless both coefficients are positive and finite.
  void validate() const;
};

/// Per-worker scratch for the quadratic terms. The grid already resolves every
/// cubic product of retained modes exactly, so no further padding is applied.
struct OperatorWorkspace {
  explicit OperatorWorkspace(const GalerkinBasis& basis) : spectral(basis) {}
  SpectralWorkspace spectral;
  VelocityGrids carrier, target;
  ScalarGrids scalar;
  Eigen::MatrixXd g1, g2, g3;
};

using Vec = Eigen::VectorXd;
using VecRef = Eigen::Ref<Eigen::VectorXd>;
using CVecRef = Eigen::Ref<const Eigen::VectorXd>;

/// A, B, R and F = -A - B - R on the Galerkin space of a basis. All vectors are full
/// state coefficient vectors (velocity block first). Stateless after construction.
class Operators {
 public:
  Operators(const GalerkinBasis& basis, PhysicsParams params);

  const GalerkinBasis& basis() const { return *basis_; }
  const PhysicsParams& params() const { return params_; }
  int size() const { return basis_->size(); }
  int velocity_size() const { return basis_->velocity_size(); }
  /// Diagonal of A: nu * lambda on velocity modes, kappa * mu on temperature modes.
  const Vec& a_diagonal() const { return a_diag_; }
  /// C_ij = (u2 of velocity mode i, temperature mode j); R = [[0, -C], [-C^T, 0]].
  const Eigen::MatrixXd& coupling() const { return coupling_; }

  void apply_A(const CVecRef& phi, VecRef out) const;
  void apply_R(const CVecRef& phi, VecRef out) const;
  /// Projection of (u . grad v, u . grad eta) for carrier u and target (v, eta).
  void advect(const CVecRef& carrier, const CVecRef& target, VecRef out,
              OperatorWorkspace& ws) const;
  void apply_B(const CVecRef& phi, VecRef out, OperatorWorkspace& ws) const;
  void apply_F(const CVecRef& phi, VecRef out, OperatorWorkspace& ws) const;
  /// (dB(phi))^T p: the transpose of the linearisation of B at phi.
  void apply_B_jacobian_transpose(const CVecRef& phi, const CVecRef& p, VecRef out,
                                  OperatorWorkspace& ws) const;

  /// <B1(u, v), w> and <B2(u, theta), eta> on velocity / temperature coefficient blocks.
  double pairing_b1(const CVecRef& u, const CVecRef& v, const CVecRef& w,
                    OperatorWorkspace& ws) const;
  double pairing_b2(const CVecRef& u, const CVecRef& theta, const CVecRef& eta,
                    OperatorWorkspace& ws) const;

  // SpectralField conveniences.
  SpectralField apply_A(const SpectralField& f) const;
  SpectralField apply_R(const SpectralField& f) const;
  SpectralField apply_B(const SpectralField& f, OperatorWorkspace& ws) const;
  SpectralField apply_F(const SpectralField& f, OperatorWorkspace& ws) const;

 private:
  const GalerkinBasis* basis_;
  PhysicsParams params_;
  Vec a_diag_;
  Eigen::MatrixXd coupling_;
};

/// sup over unit-V test functions in the retained space of <b, w>: sqrt(sum b_i^2 / e_i).
double dual_norm(const CVecRef& coeffs, const CVecRef& eigenvalues);

}  // namespace benard
