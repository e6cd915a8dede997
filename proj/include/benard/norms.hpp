#pragma once

#include "benard/field.hpp"
#include "benard/random.hpp"
#include "benard/transforms.hpp"

namespace benard {

double inner_H(const SpectralField& a, const SpectralField& b);
double norm_H(const SpectralField& field);
double norm_V_sq(const SpectralField& field, const GalerkinBasis& basis);
double norm_V(const SpectralField& field, const GalerkinBasis& basis);

/// (integral of (u1^2 + u2^2 + theta^2)^2)^(1/4) by grid quadrature.
double norm_L4(const SpectralField& field, SpectralWorkspace& ws);
/// Same for the velocity part alone (pointwise Euclidean norm of u).
double velocity_L4(const Eigen::Ref<const Eigen::VectorXd>& u, SpectralWorkspace& ws);
double temperature_L4(const Eigen::Ref<const Eigen::VectorXd>& theta, SpectralWorkspace& ws);

/// |v|_{L4}^2 / (|v| ||v||) for a velocity or temperature coefficient block.
double velocity_l4_ratio(const Eigen::Ref<const Eigen::VectorXd>& u, SpectralWorkspace& ws);
double temperature_l4_ratio(const Eigen::Ref<const Eigen::VectorXd>& theta, SpectralWorkspace& ws);

/// Gaussian coefficients scaled by (eigenvalue / min eigenvalue)^(-decay / 2).
SpectralField random_field(const GalerkinBasis& basis, Rng& rng, double decay = 1.0);

struct EmbeddingConstants {
  double c1_hat = 0.0;  // sampled Ladyzhenskaya constant
  double c2_hat = 0.0;  // Poincare constant 1 / sqrt(min eigenvalue)
  int samples = 0;
};

/// c1_hat is the largest |v|_{L4}^2 / (|v| ||v||) over random velocity and temperature
/// fields of varied spectral decay; c2_hat is exact for the retained basis.
EmbeddingConstants estimate_constants(const GalerkinBasis& basis, int sample_count, Rng& rng);

}  // namespace benard
