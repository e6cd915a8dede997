#include "benard/norms.hpp"

#include <array>
#include <cmath>

namespace benard {

double inner_H(const SpectralField& a, const SpectralField& b) { return a.values().dot(b.values()); }

double norm_H(const SpectralField& field) { return field.values().norm(); }

double norm_V_sq(const SpectralField& field, const GalerkinBasis& basis) {
  field.check(basis);
  return (basis.eigenvalues().array() * field.values().array().square()).sum();
}

double norm_V(const SpectralField& field, const GalerkinBasis& basis) {
  return std::sqrt(norm_V_sq(field, basis));
}

double norm_L4(const SpectralField& field, SpectralWorkspace& ws) {
  field.check(ws.basis());
  VelocityGrids v;
  ScalarGrids s;
  ws.synth_velocity(field.u(), v, false);
  ws.synth_scalar(field.theta(), s, false);
  const Eigen::MatrixXd sq =
      v.u1.array().square() + v.u2.array().square() + s.value.array().square();
  return std::pow(ws.integrate(sq.array().square().matrix()), 0.25);
}

double velocity_L4(const Eigen::Ref<const Eigen::VectorXd>& u, SpectralWorkspace& ws) {
  VelocityGrids v;
  ws.synth_velocity(u, v, false);
  const Eigen::MatrixXd sq = v.u1.array().square() + v.u2.array().square();
  return std::pow(ws.integrate(sq.array().square().matrix()), 0.25);
}

double temperature_L4(const Eigen::Ref<const Eigen::VectorXd>& theta, SpectralWorkspace& ws) {
  ScalarGrids s;
  ws.synth_scalar(theta, s, false);
  return std::pow(ws.integrate(s.value.array().pow(4).matrix()), 0.25);
}

double velocity_l4_ratio(const Eigen::Ref<const Eigen::VectorXd>& u, SpectralWorkspace& ws) {
  const auto& eig = ws.basis().velocity().eigenvalues;
  const double h = u.norm();
  const double v = std::sqrt((eig.array() * u.array().square()).sum());
  if (h == 0.0) return 0.0;
  const double l4 = velocity_L4(u, ws);
  return l4 * l4 / (h * v);
}

double temperature_l4_ratio(const Eigen::Ref<const Eigen::VectorXd>& theta, SpectralWorkspace& ws) {
  const auto& eig = ws.basis().temperature().eigenvalues;
  const double h = theta.norm();
  const double v = std::sqrt((eig.array() * theta.array().square()).sum());
  if (h == 0.0) return 0.0;
  const double l4 = temperature_L4(theta, ws);
  return l4 * l4 / (h * v);
}

SpectralField random_field(const GalerkinBasis& basis, Rng& rng, double decay) {
  SpectralField f = SpectralField::zeros(basis);
  const double base = basis.min_eigenvalue();
  for (int i = 0; i < f.size(); ++i)
    f.values()[i] = standard_normal(rng) * std::pow(basis.eigenvalues()[i] / base, -0.5 * decay);
  return f;
}

EmbeddingConstants estimate_constants(const GalerkinBasis& basis, int sample_count, Rng& rng) {
  EmbeddingConstants out;
  out.c2_hat = 1.0 / std::sqrt(basis.min_eigenvalue());
  SpectralWorkspace ws(basis);
  constexpr std::array<double, 4> decays{0.0, 0.5, 1.0, 2.0};
  for (int s = 0; s < sample_count; ++s) {
    const auto f = random_field(basis, rng, decays[s % decays.size()]);
    if (basis.velocity_size() > 0)
      out.c1_hat = std::max(out.c1_hat, velocity_l4_ratio(f.u(), ws));
    if (basis.temperature_size() > 0)
      out.c1_hat = std::max(out.c1_hat, temperature_l4_ratio(f.theta(), ws));
  }
  out.samples = sample_count;
  return out;
}

}  // namespace benard
