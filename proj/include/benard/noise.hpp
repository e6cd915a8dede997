#pragma once

#include <string>
#include <vector>

#include "benard/basis.hpp"
#include "benard/field.hpp"
#include "benard/operators.hpp"
#include "benard/random.hpp"

namespace benard {

/// Q diagonal in the Galerkin basis: Q e_j = lambda_j e_j.
struct CovarianceSpec {
  Vec lambdas;
  /// Estimated trace carried by the modes beyond the truncation (0 for explicit lists).
  double tail_estimate = 0.0;

  /// lambda_j = amplitude * (1 + eigenvalue_j)^(-decay), decay > 1.
  static CovarianceSpec decay_law(const GalerkinBasis& basis, double amplitude, double decay);
  static CovarianceSpec explicit_list(Vec lambdas);

  int size() const { return static_cast<int>(lambdas.size()); }
  double trace() const { return lambdas.sum(); }
  double max_lambda() const { return lambdas.size() ? lambdas.maxCoeff() : 0.0; }
  bool supported(int j) const { return lambdas[j] > 0.0; }
};

enum class SigmaFamily { Additive, DiagonalBounded, LinearClipped };
std::string to_string(SigmaFamily family);
SigmaFamily parse_sigma_family(const std::string& text);

/// sigma(phi) acts diagonally on the Q-eigenbasis: sigma(phi) w = d(phi) .* w with
///   Additive(s):            d_j = s
///   DiagonalBounded(a, b):  d_j = a + b tanh(phi_j)
///   LinearClipped(s, c):    d_j = s clamp(phi_j, -c, c)
class DiffusionCoefficient {
 public:
  static DiffusionCoefficient additive(double scale);
  static DiffusionCoefficient diagonal_bounded(double offset, double gain);
  static DiffusionCoefficient linear_clipped(double scale, double clip);
  /// Family plus its parameter list, as read from a configuration.
  static DiffusionCoefficient make(SigmaFamily family, const std::vector<double>& params);

  SigmaFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  bool state_dependent() const { return family_ != SigmaFamily::Additive; }

  void multiplier(const CVecRef& phi, VecRef d) const;
  /// d d_j / d phi_j (the multiplier depends only on its own coordinate).
  void multiplier_derivative(const CVecRef& phi, VecRef dd) const;

  /// Growth constant K in |sigma(phi)|^2_LQ <= K (1 + |phi|^2).
  double growth_constant(const CovarianceSpec& q) const;
  /// Lipschitz constant L in |sigma(phi) - sigma(psi)|^2_LQ <= L |phi - psi|^2.
  double lipschitz_constant(const CovarianceSpec& q) const;
  /// Same bounds with |.|_L4 on the right: |phi|^2 <= sqrt(l) |phi|_L4^2 on the strip.
  double growth_constant_l4(const CovarianceSpec& q, double length) const;
  double lipschitz_constant_l4(const CovarianceSpec& q, double length) const;

 private:
  SigmaFamily family_ = SigmaFamily::Additive;
  std::vector<double> params_{1.0};
};

/// |sigma(phi)|^2_LQ = sum_j lambda_j |d_j(phi)|^2.
double lq_norm_sq(const DiffusionCoefficient& sigma, const CovarianceSpec& q, const CVecRef& phi);
/// |sigma(phi) - sigma(psi)|^2_LQ.
double lq_distance_sq(const DiffusionCoefficient& sigma, const CovarianceSpec& q,
                      const CVecRef& phi, const CVecRef& psi);

SpectralField apply_sigma(const DiffusionCoefficient& sigma, const SpectralField& phi,
                          const SpectralField& direction);
/// Throws InvalidControlError if h has a component on a mode without noise.
SpectralField apply_sigma_to_control(const DiffusionCoefficient& sigma, const CovarianceSpec& q,
                                     const SpectralField& phi, const SpectralField& h);

/// Independent N(0, lambda_j dt) per mode.
void sample_wiener_increment(const CovarianceSpec& q, double dt, Rng& rng, VecRef out);
SpectralField sample_wiener_increment(const CovarianceSpec& q, const GalerkinBasis& basis,
                                      double dt, Rng& rng);

/// |h|_0^2 = sum h_j^2 / lambda_j; throws InvalidControlError on unsupported modes.
double h0_norm_sq(const CovarianceSpec& q, const CVecRef& h);
/// (Q^{-1/2} h, Q^{-1/2} h) formed explicitly with the dense operator.
double h0_norm_sq_explicit(const CovarianceSpec& q, const CVecRef& h);

/// Piecewise-constant H0-valued control on a uniform grid of [0, T]:
/// row k is the value on [k dt, (k + 1) dt).
struct ControlPath {
  double horizon = 1.0;
  Eigen::MatrixXd values;  // n_steps x state size

  static ControlPath zeros(double horizon, int n_steps, int state_size);
  int steps() const { return static_cast<int>(values.rows()); }
  int state_size() const { return static_cast<int>(values.cols()); }
  double dt() const { return horizon / steps(); }
  auto at(int k) const { return values.row(k).transpose(); }
  /// Same path on a grid refined by an integer factor.
  ControlPath refined(int factor) const;
};

/// 1/2 sum_k |h_k|_0^2 dt.
double action(const ControlPath& h, const CovarianceSpec& q);
bool in_S_M(const ControlPath& h, const CovarianceSpec& q, double M);

/// Smallness threshold eps0 = eps_{0,2} ^ (nu ^ kappa) / (2 L) from the moment recursion
///   eps_{0,i} = 1 ^ (nu^kappa)/(8 i K) ^ (nu^kappa)/(144 i K [1 + C_i e^{C_i}]^2) ^ eps_{0,i-1},
///   C_i = 2 i T + i^2 c K~ M / delta_1,  delta_1 = (nu^kappa) i / 2,  c = c1 c2.
/// Computed in log space; eps0 underflows to 0 for realistic inputs.
struct EpsilonGuard {
  double eps0 = 0.0;
  double log10_eps0 = 0.0;
  double eps02 = 0.0;
  double lipschitz_cap = 0.0;
};
EpsilonGuard epsilon_guard(double nu_wedge_kappa, double K, double K_tilde, double L, double T,
                           double M, double c);

}  // namespace benard
