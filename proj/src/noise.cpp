#include "benard/noise.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "benard/error.hpp"

namespace benard {

CovarianceSpec CovarianceSpec::decay_law(const GalerkinBasis& basis, double amplitude,
                                         double decay) {
  if (!(amplitude >= 0.0)) throw ConfigError("noise.amplitude must be non-negative");
  if (!(decay > 1.0)) throw ConfigError("noise.decay_s must exceed 1 for a trace-class Q");
  CovarianceSpec q;
  q.lambdas = amplitude * (1.0 + basis.eigenvalues().array()).pow(-decay).matrix();
  // Weyl count: both fields have about l E / (4 pi) modes below E, so the omitted
  // trace is roughly (l / 2 pi) * amplitude * (1 + E_max)^(1 - s) / (s - 1).
  const double e_max = basis.eigenvalues().maxCoeff();
  q.tail_estimate = basis.domain().length / (2.0 * std::numbers::pi) * amplitude *
                    std::pow(1.0 + e_max, 1.0 - decay) / (decay - 1.0);
  return q;
}

CovarianceSpec CovarianceSpec::explicit_list(Vec lambdas) {
  if (!lambdas.allFinite() || (lambdas.array() < 0.0).any())
    throw ConfigError("noise.lambdas must be finite and non-negative");
  CovarianceSpec q;
  q.lambdas = std::move(lambdas);
  return q;
}

std::string to_string(SigmaFamily family) {
  switch (family) {
    case SigmaFamily::Additive: return "additive";
    case SigmaFamily::DiagonalBounded: return "diagonal_bounded";
    case SigmaFamily::LinearClipped: return "linear_clipped";
  }
  return "?";
}

SigmaFamily parse_sigma_family(const std::string& text) {
  if (text == "additive") return SigmaFamily::Additive;
  if (text == "diagonal_bounded") return SigmaFamily::DiagonalBounded;
  if (text == "linear_clipped") return SigmaFamily::LinearClipped;
  throw ConfigError(fmt::format(
      "unknown sigma.family '{}' (expected additive, diagonal_bounded or linear_clipped)", text));
}

DiffusionCoefficient DiffusionCoefficient::additive(double scale) {
  DiffusionCoefficient s;
  s.family_ = SigmaFamily::Additive;
  s.params_ = {scale};
  return s;
}

DiffusionCoefficient DiffusionCoefficient::diagonal_bounded(double offset, double gain) {
  DiffusionCoefficient s;
  s.family_ = SigmaFamily::DiagonalBounded;
  s.params_ = {offset, gain};
  return s;
}

DiffusionCoefficient DiffusionCoefficient::linear_clipped(double scale, double clip) {
  if (!(clip > 0.0)) throw ConfigError("linear_clipped clip level must be positive");
  DiffusionCoefficient s;
  s.family_ = SigmaFamily::LinearClipped;
  s.params_ = {scale, clip};
  return s;
}

DiffusionCoefficient DiffusionCoefficient::make(SigmaFamily family,
                                                const std::vector<double>& params) {
  const std::size_t want = family == SigmaFamily::Additive ? 1 : 2;
  if (params.size() != want)
    throw ConfigError(fmt::format("sigma.params: {} expects {} value(s), got {}",
                                  to_string(family), want, params.size()));
  for (double p : params)
    if (!std::isfinite(p)) throw ConfigError("sigma.params must be finite");
  switch (family) {
    case SigmaFamily::Additive: return additive(params[0]);
    case SigmaFamily::DiagonalBounded: return diagonal_bounded(params[0], params[1]);
    case SigmaFamily::LinearClipped: return linear_clipped(params[0], params[1]);
  }
  return additive(params[0]);
}

void DiffusionCoefficient::multiplier(const CVecRef& phi, VecRef d) const {
  switch (family_) {
    case SigmaFamily::Additive:
      d.setConstant(params_[0]);
      break;
    case SigmaFamily::DiagonalBounded:
      d = (params_[0] + params_[1] * phi.array().tanh()).matrix();
      break;
    case SigmaFamily::LinearClipped:
      d = (params_[0] * phi.array().max(-params_[1]).min(params_[1])).matrix();
      break;
  }
}

void DiffusionCoefficient::multiplier_derivative(const CVecRef& phi, VecRef dd) const {
  switch (family_) {
    case SigmaFamily::Additive:
      dd.setZero();
      break;
    case SigmaFamily::DiagonalBounded:
      dd = (params_[1] * (1.0 - phi.array().tanh().square())).matrix();
      break;
    case SigmaFamily::LinearClipped:
      for (Eigen::Index j = 0; j < phi.size(); ++j)
        dd[j] = std::abs(phi[j]) < params_[1] ? params_[0] : 0.0;
      break;
  }
}

double DiffusionCoefficient::growth_constant(const CovarianceSpec& q) const {
  switch (family_) {
    case SigmaFamily::Additive: return params_[0] * params_[0] * q.trace();
    case SigmaFamily::DiagonalBounded: {
      const double b = std::abs(params_[0]) + std::abs(params_[1]);
      return b * b * q.trace();
    }
    case SigmaFamily::LinearClipped: {
      const double s2 = params_[0] * params_[0];
      return s2 * std::min(q.max_lambda(), params_[1] * params_[1] * q.trace());
    }
  }
  return 0.0;
}

double DiffusionCoefficient::lipschitz_constant(const CovarianceSpec& q) const {
  switch (family_) {
    case SigmaFamily::Additive: return 0.0;
    case SigmaFamily::DiagonalBounded: return params_[1] * params_[1] * q.max_lambda();
    case SigmaFamily::LinearClipped: return params_[0] * params_[0] * q.max_lambda();
  }
  return 0.0;
}

double DiffusionCoefficient::growth_constant_l4(const CovarianceSpec& q, double length) const {
  return growth_constant(q) * std::max(1.0, std::sqrt(length));
}

double DiffusionCoefficient::lipschitz_constant_l4(const CovarianceSpec& q, double length) const {
  return lipschitz_constant(q) * std::sqrt(length);
}

double lq_norm_sq(const DiffusionCoefficient& sigma, const CovarianceSpec& q, const CVecRef& phi) {
  Vec d(phi.size());
  sigma.multiplier(phi, d);
  return (q.lambdas.array() * d.array().square()).sum();
}

double lq_distance_sq(const DiffusionCoefficient& sigma, const CovarianceSpec& q,
                      const CVecRef& phi, const CVecRef& psi) {
  Vec a(phi.size()), b(psi.size());
  sigma.multiplier(phi, a);
  sigma.multiplier(psi, b);
  return (q.lambdas.array() * (a - b).array().square()).sum();
}

SpectralField apply_sigma(const DiffusionCoefficient& sigma, const SpectralField& phi,
                          const SpectralField& direction) {
  if (phi.size() != direction.size()) throw ShapeError("apply_sigma: size mismatch");
  SpectralField out(phi.velocity_size(), phi.temperature_size());
  sigma.multiplier(phi.values(), out.values());
  out.values().array() *= direction.values().array();
  return out;
}

SpectralField apply_sigma_to_control(const DiffusionCoefficient& sigma, const CovarianceSpec& q,
                                     const SpectralField& phi, const SpectralField& h) {
  h0_norm_sq(q, h.values());  // rejects unsupported components
  return apply_sigma(sigma, phi, h);
}

void sample_wiener_increment(const CovarianceSpec& q, double dt, Rng& rng, VecRef out) {
  if (dt < 0.0) throw std::invalid_argument("sample_wiener_increment: dt must be >= 0");
  for (int j = 0; j < q.size(); ++j) out[j] = std::sqrt(q.lambdas[j] * dt) * standard_normal(rng);
}

SpectralField sample_wiener_increment(const CovarianceSpec& q, const GalerkinBasis& basis,
                                      double dt, Rng& rng) {
  SpectralField out = SpectralField::zeros(basis);
  if (q.size() != out.size()) throw ShapeError("covariance size does not match the basis");
  sample_wiener_increment(q, dt, rng, out.values());
  return out;
}

double h0_norm_sq(const CovarianceSpec& q, const CVecRef& h) {
  if (h.size() != q.size()) throw ShapeError("control size does not match the covariance");
  double s = 0.0;
  for (int j = 0; j < q.size(); ++j) {
    if (h[j] == 0.0) continue;
    if (!q.supported(j))
      throw InvalidControlError(fmt::format("control has a component on mode {} where Q has no mass", j));
    s += h[j] * h[j] / q.lambdas[j];
  }
  return s;
}

double h0_norm_sq_explicit(const CovarianceSpec& q, const CVecRef& h) {
  if (h.size() != q.size()) throw ShapeError("control size does not match the covariance");
  for (int j = 0; j < q.size(); ++j)
    if (h[j] != 0.0 && !q.supported(j))
      throw InvalidControlError(fmt::format("control has a component on mode {} where Q has no mass", j));
  const Eigen::Index n = q.size();
  Eigen::MatrixXd q_inv_sqrt = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    if (q.supported(static_cast<int>(j))) q_inv_sqrt(j, j) = 1.0 / std::sqrt(q.lambdas[j]);
  const Vec w = q_inv_sqrt * h;
  return w.dot(w);
}

ControlPath ControlPath::zeros(double horizon, int n_steps, int state_size) {
  if (!(horizon > 0.0) || n_steps < 1) throw ConfigError("control path needs T > 0 and n_steps >= 1");
  ControlPath h;
  h.horizon = horizon;
  h.values = Eigen::MatrixXd::Zero(n_steps, state_size);
  return h;
}

ControlPath ControlPath::refined(int factor) const {
  ControlPath out = zeros(horizon, steps() * factor, state_size());
  for (int k = 0; k < out.steps(); ++k) out.values.row(k) = values.row(k / factor);
  return out;
}

double action(const ControlPath& h, const CovarianceSpec& q) {
  double s = 0.0;
  for (int k = 0; k < h.steps(); ++k) s += h0_norm_sq(q, h.at(k));
  return 0.5 * s * h.dt();
}

bool in_S_M(const ControlPath& h, const CovarianceSpec& q, double M) {
  return 2.0 * action(h, q) <= M;
}

EpsilonGuard epsilon_guard(double nu_wedge_kappa, double K, double K_tilde, double L, double T,
                           double M, double c) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nk = nu_wedge_kappa;
  double log_eps = 0.0;  // eps_{0,0} = 1
  for (int i = 1; i <= 2; ++i) {
    const double delta1 = nk * i / 2.0;
    const double ci = 2.0 * i * T + i * i * c * K_tilde * M / delta1;
    // log(1 + C e^C) without overflow
    const double log_g = ci > 30.0 ? ci + std::log(ci) + std::log1p(std::exp(-ci) / ci)
                                   : std::log1p(ci * std::exp(ci));
    const double a = K > 0.0 ? std::log(nk / (8.0 * i * K)) : inf;
    const double b = K > 0.0 ? std::log(nk / (144.0 * i * K)) - 2.0 * log_g : inf;
    log_eps = std::min({log_eps, a, b});
  }
  EpsilonGuard g;
  g.eps02 = std::exp(log_eps);
  g.lipschitz_cap = L > 0.0 ? nk / (2.0 * L) : inf;
  const double log_cap = L > 0.0 ? std::log(g.lipschitz_cap) : inf;
  const double log_eps0 = std::min(log_eps, log_cap);
  g.eps0 = std::exp(log_eps0);
  g.log10_eps0 = log_eps0 / std::log(10.0);
  return g;
}

}  // namespace benard
