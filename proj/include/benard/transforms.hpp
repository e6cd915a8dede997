#pragma once

#include <Eigen/Dense>

#include "benard/basis.hpp"
#include "benard/field.hpp"

namespace benard {

struct VelocityGrids {
  Eigen::MatrixXd u1, u2;
  Eigen::MatrixXd d1u1, d2u1, d1u2, d2u2;
};

struct ScalarGrids {
  Eigen::MatrixXd value;
  Eigen::MatrixXd d1, d2;
};

/// Separable synthesis/projection between coefficients and the quadrature grid.
/// Holds scratch buffers only; one instance per worker. The basis must outlive it.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const GalerkinBasis& basis);

  const GalerkinBasis& basis() const { return *basis_; }

  void synth_velocity(const Eigen::Ref<const Eigen::VectorXd>& coeffs, VelocityGrids& out,
                      bool gradients);
  void synth_scalar(const Eigen::Ref<const Eigen::VectorXd>& coeffs, ScalarGrids& out,
                    bool gradients);

  /// Coefficients of the L2 projection of the vector field (g1, g2) onto the velocity modes.
  void project_velocity(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2,
                        Eigen::Ref<Eigen::VectorXd> out);
  void project_scalar(const Eigen::MatrixXd& g, Eigen::Ref<Eigen::VectorXd> out);

  /// Quadrature of a grid function over the domain.
  double integrate(const Eigen::MatrixXd& g) const;

 private:
  void moments(const Eigen::MatrixXd& g, Eigen::MatrixXd& out);

  const GalerkinBasis* basis_;
  Eigen::MatrixXd weighted_table_t_;  // (x1 table * w_x)^T
  Eigen::VectorXd wz_;
  Eigen::MatrixXd h1_, h2_, h1z_, h2z_;
  Eigen::MatrixXd m1_, m2_;
};

PhysicalField synth(const SpectralField& field, SpectralWorkspace& ws);
SpectralField analyze(const PhysicalField& physical, SpectralWorkspace& ws);

}  // namespace benard
