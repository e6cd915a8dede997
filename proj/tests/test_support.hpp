#pragma once

// Test-side closed forms for the free-slip basis, written from the formulas rather
// than from the library's tables, plus brute-force midpoint quadrature.

#include <cmath>
#include <functional>
#include <numbers>

#include "benard/basis.hpp"
#include "benard/operators.hpp"

namespace testing {

using benard::GalerkinBasis;
using benard::ModeLabel;
using benard::Vec;
constexpr double pi = std::numbers::pi;

struct Point {
  double u1 = 0, u2 = 0, th = 0;
  double u1x = 0, u1z = 0, u2x = 0, u2z = 0, thx = 0, thz = 0;
};

struct FreeSlip {
  double l;

  double alpha(int k1) const { return 2.0 * pi * std::abs(k1) / l; }
  // X, X', X'' of the normalised horizontal function.
  void horizontal(int k1, double x, double& X, double& dX, double& ddX) const {
    const double a = alpha(k1);
    if (k1 == 0) {
      X = 1.0 / std::sqrt(l);
      dX = ddX = 0.0;
    } else if (k1 > 0) {
      const double c = std::sqrt(2.0 / l);
      X = c * std::cos(a * x);
      dX = -a * c * std::sin(a * x);
      ddX = -a * a * X;
    } else {
      const double c = std::sqrt(2.0 / l);
      X = c * std::sin(a * x);
      dX = a * c * std::cos(a * x);
      ddX = -a * a * X;
    }
  }
  double velocity_eigenvalue(ModeLabel m) const {
    return alpha(m.k1) * alpha(m.k1) + pi * pi * m.index * m.index;
  }
  double temperature_eigenvalue(ModeLabel m) const { return velocity_eigenvalue(m); }

  // Streamfunction X(x) f(z), f = sqrt2 / sqrt(a^2 + pi^2 m^2) sin(pi m z); shear modes
  // (k1 = 0) are sqrt2 cos(pi m z) / sqrt(l) in u1.
  void add_velocity(ModeLabel m, double c, double x, double z, Point& p) const {
    double X, dX, ddX;
    horizontal(m.k1, x, X, dX, ddX);
    const double w = pi * m.index;
    if (m.k1 == 0) {
      p.u1 += c * X * std::sqrt(2.0) * std::cos(w * z);
      p.u1z += -c * X * std::sqrt(2.0) * w * std::sin(w * z);
      return;
    }
    const double a = alpha(m.k1);
    const double amp = std::sqrt(2.0) / std::sqrt(a * a + w * w);
    const double f = amp * std::sin(w * z), df = amp * w * std::cos(w * z), ddf = -w * w * f;
    p.u1 += c * X * df;
    p.u2 += -c * dX * f;
    p.u1x += c * dX * df;
    p.u1z += c * X * ddf;
    p.u2x += -c * ddX * f;
    p.u2z += -c * dX * df;
  }
  void add_temperature(ModeLabel m, double c, double x, double z, Point& p) const {
    double X, dX, ddX;
    horizontal(m.k1, x, X, dX, ddX);
    const double w = pi * m.index;
    const double g = std::sqrt(2.0) * std::sin(w * z), dg = std::sqrt(2.0) * w * std::cos(w * z);
    p.th += c * X * g;
    p.thx += c * dX * g;
    p.thz += c * X * dg;
  }
  Point evaluate(const GalerkinBasis& b, const Vec& phi, double x, double z) const {
    Point p;
    const int nv = b.velocity_size();
    for (int i = 0; i < nv; ++i)
      if (phi[i] != 0.0) add_velocity(b.velocity().labels[i], phi[i], x, z, p);
    for (int j = 0; j < b.temperature_size(); ++j)
      if (phi[nv + j] != 0.0) add_temperature(b.temperature().labels[j], phi[nv + j], x, z, p);
    return p;
  }
};

// Midpoint rule on (0, l) x (0, 1): exact for trigonometric integrands of low enough degree.
inline double midpoint(double l, int nx, int nz, const std::function<double(double, double)>& g) {
  double s = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) s += g((i + 0.5) * l / nx, (j + 0.5) / nz);
  return s * (l / nx) * (1.0 / nz);
}

// Two-mode system: the lowest cosine velocity roll and the sine temperature mode it
// couples to. With l = 2 sqrt(2) both eigenvalues equal 3 pi^2 / 2.
inline GalerkinBasis toy_basis() {
  benard::Domain d;
  d.length = 2.0 * std::sqrt(2.0);
  benard::BasisSpec s;
  s.max_k1 = 1;
  s.max_k2 = 1;
  s.velocity_modes = 1;
  const auto full = GalerkinBasis::build(d, s);
  return full.subset({full.find_velocity({1, 1})}, {full.find_temperature({-1, 1})});
}

inline GalerkinBasis free_slip_basis(int k, double l = 2.0) {
  benard::Domain d;
  d.length = l;
  benard::BasisSpec s;
  s.max_k1 = k;
  s.max_k2 = k;
  s.velocity_modes = k;
  return GalerkinBasis::build(d, s);
}

}  // namespace testing
