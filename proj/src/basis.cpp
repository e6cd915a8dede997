#include "benard/basis.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "benard/error.hpp"

namespace benard {

namespace {

constexpr double kPi = std::numbers::pi;

int even_at_least(int n, int floor_value) {
  n = std::max(n, floor_value);
  return n % 2 == 0 ? n : n + 1;
}

int vertical_cutoff(const BasisSpec& spec) { return std::max(spec.max_k2, spec.velocity_modes); }

int minimum_grid_x1(int max_k1) { return even_at_least(3 * max_k1 + 1, 4); }

int minimum_grid_x2(const BasisSpec& spec) {
  const int kz = vertical_cutoff(spec);
  if (spec.bc == BoundaryMode::FreeSlip) return even_at_least(3 * kz / 2 + 1, 4);
  const int res = spec.profile_resolution > 0 ? spec.profile_resolution : auto_profile_resolution(spec);
  return even_at_least(res + 4 + 3 * kz, 4);
}

// Shen's biharmonic basis on [-1, 1]:
// L_j - 2(2j+5)/(2j+7) L_{j+2} + (2j+3)/(2j+7) L_{j+4}, which has f = f' = 0 at +-1.
void shen_basis(int resolution, double z, Eigen::VectorXd& f, Eigen::VectorXd& df,
                Eigen::VectorXd& ddf) {
  std::vector<double> p, dp, ddp;
  const double y = 2.0 * z - 1.0;
  legendre_table(resolution + 3, y, p, dp, ddp);
  f.resize(resolution);
  df.resize(resolution);
  ddf.resize(resolution);
  for (int j = 0; j < resolution; ++j) {
    const double a = -2.0 * (2.0 * j + 5.0) / (2.0 * j + 7.0);
    const double b = (2.0 * j + 3.0) / (2.0 * j + 7.0);
    f[j] = p[j] + a * p[j + 2] + b * p[j + 4];
    df[j] = 2.0 * (dp[j] + a * dp[j + 2] + b * dp[j + 4]);
    ddf[j] = 4.0 * (ddp[j] + a * ddp[j + 2] + b * ddp[j + 4]);
  }
}

}  // namespace

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::FreeSlip ? "free_slip" : "no_slip";
}

BoundaryMode parse_boundary_mode(const std::string& text) {
  if (text == "free_slip") return BoundaryMode::FreeSlip;
  if (text == "no_slip") return BoundaryMode::NoSlip;
  throw ConfigError(fmt::format("unknown boundary mode '{}' (expected free_slip or no_slip)", text));
}

int required_grid_x1(int max_k1) { return even_at_least(4 * max_k1 + 2, 4); }

int auto_profile_resolution(const BasisSpec& spec) { return 2 * spec.velocity_modes + 16; }

int required_grid_x2(const BasisSpec& spec) {
  const int kz = vertical_cutoff(spec);
  if (spec.bc == BoundaryMode::FreeSlip) return even_at_least(2 * kz + 2, 4);
  const int res = spec.profile_resolution > 0 ? spec.profile_resolution : auto_profile_resolution(spec);
  return even_at_least(2 * (res + 4) + 4 * kz + 16, 4);
}

void ModeSet::sort() {
  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](int a, int b) {
    const auto key = [this](int i) {
      return std::make_tuple(eigenvalues[i], std::abs(labels[i].k1), labels[i].k1 < 0 ? 1 : 0,
                             labels[i].index);
    };
    return key(a) < key(b);
  });
  *this = select(order);
}

ModeSet ModeSet::select(const std::vector<int>& indices) const {
  ModeSet out;
  out.vector_valued = vector_valued;
  const int n = static_cast<int>(indices.size());
  out.eigenvalues.resize(n);
  out.profile1.resize(profile1.rows(), n);
  out.dz_profile1.resize(dz_profile1.rows(), n);
  if (is_vector()) {
    out.profile2.resize(profile2.rows(), n);
    out.dz_profile2.resize(dz_profile2.rows(), n);
  }
  for (int c = 0; c < n; ++c) {
    const int i = indices[c];
    if (i < 0 || i >= size()) throw ShapeError(fmt::format("mode index {} out of range", i));
    out.labels.push_back(labels[i]);
    out.harmonic.push_back(harmonic[i]);
    out.parity.push_back(parity[i]);
    out.eigenvalues[c] = eigenvalues[i];
    out.profile1.col(c) = profile1.col(i);
    out.dz_profile1.col(c) = dz_profile1.col(i);
    if (is_vector()) {
      out.profile2.col(c) = profile2.col(i);
      out.dz_profile2.col(c) = dz_profile2.col(i);
    }
  }
  return out;
}

ModeSet build_temperature_modes(const Domain& domain, const VerticalQuadrature& vertical,
                                int max_k1, int max_k2) {
  if (max_k1 < 0 || max_k2 < 1) throw ConfigError("temperature cutoffs must satisfy k1 >= 0, k2 >= 1");
  const int nz = vertical.size();
  const int count = (2 * max_k1 + 1) * max_k2;
  ModeSet set;
  set.eigenvalues.resize(count);
  set.profile1.resize(nz, count);
  set.dz_profile1.resize(nz, count);
  int c = 0;
  for (int k1 = -max_k1; k1 <= max_k1; ++k1) {
    const double alpha = 2.0 * kPi * std::abs(k1) / domain.length;
    for (int k2 = 1; k2 <= max_k2; ++k2) {
      set.labels.push_back({k1, k2});
      set.harmonic.push_back(std::abs(k1));
      set.parity.push_back(k1 < 0 ? 1 : 0);
      set.eigenvalues[c] = alpha * alpha + (kPi * k2) * (kPi * k2);
      for (int z = 0; z < nz; ++z) {
        const double arg = kPi * k2 * vertical.nodes[z];
        set.profile1(z, c) = std::numbers::sqrt2 * std::sin(arg);
        set.dz_profile1(z, c) = std::numbers::sqrt2 * kPi * k2 * std::cos(arg);
      }
      ++c;
    }
  }
  set.sort();
  return set;
}

void ChannelEigen::evaluate(int mode, const std::vector<double>& z, Eigen::VectorXd& f,
                            Eigen::VectorXd& df, Eigen::VectorXd& ddf) const {
  const int n = static_cast<int>(z.size());
  f.resize(n);
  df.resize(n);
  ddf.resize(n);
  Eigen::VectorXd b, db, ddb;
  for (int i = 0; i < n; ++i) {
    shen_basis(resolution, z[i], b, db, ddb);
    f[i] = b.dot(coefficients.col(mode));
    df[i] = db.dot(coefficients.col(mode));
    ddf[i] = ddb.dot(coefficients.col(mode));
  }
}

ChannelEigen solve_channel_stokes(double alpha, int count, int resolution) {
  if (resolution < count) throw ConfigError("no-slip profile resolution below the requested mode count");
  const auto gl = VerticalQuadrature::gauss_legendre(resolution + 6);
  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(resolution, resolution);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(resolution, resolution);
  const double a2 = alpha * alpha;
  Eigen::VectorXd f, df, ddf;
  for (int q = 0; q < gl.size(); ++q) {
    shen_basis(resolution, gl.nodes[q], f, df, ddf);
    const double w = gl.weights[q];
    stiffness.noalias() += w * (ddf * ddf.transpose() + 2.0 * a2 * df * df.transpose() +
                                a2 * a2 * f * f.transpose());
    mass.noalias() += w * (df * df.transpose() + a2 * f * f.transpose());
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(stiffness, mass);
  if (solver.info() != Eigen::Success)
    throw EigenSolveError(fmt::format("no-slip eigensolve failed for alpha = {}", alpha));
  ChannelEigen out;
  out.alpha = alpha;
  out.resolution = resolution;
  out.eigenvalues = solver.eigenvalues().head(count);
  out.coefficients = solver.eigenvectors().leftCols(count);
  if (out.eigenvalues.minCoeff() <= 0.0)
    throw EigenSolveError(fmt::format("non-positive no-slip eigenvalue {} at alpha = {}",
                                      out.eigenvalues.minCoeff(), alpha));
  // Fix the eigenvector sign: largest |f| on a fixed sample grid is positive.
  std::vector<double> probe(65);
  for (int i = 0; i < 65; ++i) probe[i] = i / 64.0;
  for (int m = 0; m < count; ++m) {
    Eigen::VectorXd pf, pdf, pddf;
    out.evaluate(m, probe, pf, pdf, pddf);
    Eigen::Index at = 0;
    pf.cwiseAbs().maxCoeff(&at);
    if (pf[at] < 0.0) out.coefficients.col(m) *= -1.0;
  }
  return out;
}

ModeSet build_velocity_modes(const Domain& domain, const VerticalQuadrature& vertical,
                             int max_k1, int modes_per_k1, BoundaryMode bc,
                             int profile_resolution) {
  if (max_k1 < 0 || modes_per_k1 < 1) throw ConfigError("velocity cutoffs must satisfy k1 >= 0, modes >= 1");
  const int nz = vertical.size();
  const int count = (2 * max_k1 + 1) * modes_per_k1;
  ModeSet set;
  set.vector_valued = true;
  set.eigenvalues.resize(count);
  set.profile1 = Eigen::MatrixXd::Zero(nz, count);
  set.dz_profile1 = Eigen::MatrixXd::Zero(nz, count);
  set.profile2 = Eigen::MatrixXd::Zero(nz, count);
  set.dz_profile2 = Eigen::MatrixXd::Zero(nz, count);
  int c = 0;

  // k1 = 0: horizontal shear flows u = (g(x2), 0).
  for (int m = 1; m <= modes_per_k1; ++m) {
    set.labels.push_back({0, m});
    set.harmonic.push_back(0);
    set.parity.push_back(0);
    set.eigenvalues[c] = (kPi * m) * (kPi * m);
    for (int z = 0; z < nz; ++z) {
      const double arg = kPi * m * vertical.nodes[z];
      if (bc == BoundaryMode::FreeSlip) {
        set.profile1(z, c) = std::numbers::sqrt2 * std::cos(arg);
        set.dz_profile1(z, c) = -std::numbers::sqrt2 * kPi * m * std::sin(arg);
      } else {
        set.profile1(z, c) = std::numbers::sqrt2 * std::sin(arg);
        set.dz_profile1(z, c) = std::numbers::sqrt2 * kPi * m * std::cos(arg);
      }
    }
    ++c;
  }

  // k1 != 0: streamfunction X(x1) f(x2), u1 = X f', u2 = -X' f.
  for (int k = 1; k <= max_k1; ++k) {
    const double alpha = 2.0 * kPi * k / domain.length;
    ChannelEigen channel;
    if (bc == BoundaryMode::NoSlip) {
      const int res = profile_resolution > 0 ? profile_resolution : 2 * modes_per_k1 + 16;
      channel = solve_channel_stokes(alpha, modes_per_k1, res);
    }
    for (int m = 1; m <= modes_per_k1; ++m) {
      Eigen::VectorXd f(nz), df(nz), ddf(nz);
      double eig = 0.0;
      if (bc == BoundaryMode::FreeSlip) {
        const double pm = kPi * m;
        const double amp = std::numbers::sqrt2 / std::sqrt(alpha * alpha + pm * pm);
        for (int z = 0; z < nz; ++z) {
          const double arg = pm * vertical.nodes[z];
          f[z] = amp * std::sin(arg);
          df[z] = amp * pm * std::cos(arg);
          ddf[z] = -amp * pm * pm * std::sin(arg);
        }
        eig = alpha * alpha + pm * pm;
      } else {
        channel.evaluate(m - 1, vertical.nodes, f, df, ddf);
        eig = channel.eigenvalues[m - 1];
      }
      for (int parity = 0; parity < 2; ++parity) {
        const double sign = parity == 0 ? 1.0 : -1.0;
        set.labels.push_back({parity == 0 ? k : -k, m});
        set.harmonic.push_back(k);
        set.parity.push_back(parity);
        set.eigenvalues[c] = eig;
        set.profile1.col(c) = df;
        set.dz_profile1.col(c) = ddf;
        set.profile2.col(c) = sign * alpha * f;
        set.dz_profile2.col(c) = sign * alpha * df;
        ++c;
      }
    }
  }
  set.sort();
  return set;
}

GalerkinBasis::GalerkinBasis(Domain domain, BasisSpec spec, VerticalQuadrature vertical,
                             ModeSet velocity, ModeSet temperature)
    : domain_(domain),
      spec_(spec),
      vertical_(std::move(vertical)),
      velocity_(std::move(velocity)),
      temperature_(std::move(temperature)) {
  finish();
}

GalerkinBasis GalerkinBasis::build(const Domain& domain_in, const BasisSpec& spec) {
  if (!(domain_in.length > 0.0) || !std::isfinite(domain_in.length))
    throw ConfigError("domain length must be positive");
  if (spec.max_k1 < 0 || spec.max_k2 < 1 || spec.velocity_modes < 1)
    throw ConfigError("basis cutoffs must be >= 1 (max_k1 >= 0)");
  Domain domain = domain_in;
  if (domain.grid_x1 == 0) {
    domain.grid_x1 = required_grid_x1(spec.max_k1);
  } else if (domain.grid_x1 % 2 != 0 || domain.grid_x1 < minimum_grid_x1(spec.max_k1)) {
    throw ConfigError(fmt::format(
        "grid_x1 = {} leaves no dealiasing headroom for max_k1 = {} (need an even size >= {})",
        domain.grid_x1, spec.max_k1, minimum_grid_x1(spec.max_k1)));
  }
  if (domain.grid_x2 == 0) {
    domain.grid_x2 = required_grid_x2(spec);
  } else if (domain.grid_x2 % 2 != 0 || domain.grid_x2 < minimum_grid_x2(spec)) {
    throw ConfigError(fmt::format(
        "grid_x2 = {} leaves no dealiasing headroom for the vertical cutoff {} (need an even size >= {})",
        domain.grid_x2, vertical_cutoff(spec), minimum_grid_x2(spec)));
  }
  BasisSpec resolved = spec;
  if (resolved.bc == BoundaryMode::NoSlip && resolved.profile_resolution == 0)
    resolved.profile_resolution = auto_profile_resolution(spec);
  auto vertical = spec.bc == BoundaryMode::FreeSlip
                      ? VerticalQuadrature::trapezoid(domain.grid_x2)
                      : VerticalQuadrature::gauss_legendre(domain.grid_x2);
  auto temperature = build_temperature_modes(domain, vertical, spec.max_k1, spec.max_k2);
  auto velocity = build_velocity_modes(domain, vertical, spec.max_k1, spec.velocity_modes, spec.bc,
                                       resolved.profile_resolution);
  return GalerkinBasis(domain, resolved, std::move(vertical), std::move(velocity),
                       std::move(temperature));
}

void GalerkinBasis::finish() {
  eigenvalues_.resize(size());
  eigenvalues_ << velocity_.eigenvalues, temperature_.eigenvalues;
  const int nx = domain_.grid_x1;
  const int nh = harmonic_count();
  x1_table_ = Eigen::MatrixXd::Zero(2 * nh, nx);
  x1_dtable_ = Eigen::MatrixXd::Zero(2 * nh, nx);
  const double l = domain_.length;
  for (int k = 0; k < nh; ++k) {
    const double alpha = 2.0 * kPi * k / l;
    const double norm = k == 0 ? 1.0 / std::sqrt(l) : std::sqrt(2.0 / l);
    for (int j = 0; j < nx; ++j) {
      // Reduce the argument exactly: alpha * x_j = 2 pi k j / nx.
      const double arg = 2.0 * kPi * static_cast<double>((static_cast<long>(k) * j) % nx) / nx;
      x1_table_(2 * k, j) = norm * std::cos(arg);
      x1_dtable_(2 * k, j) = -alpha * norm * std::sin(arg);
      if (k > 0) {
        x1_table_(2 * k + 1, j) = norm * std::sin(arg);
        x1_dtable_(2 * k + 1, j) = alpha * norm * std::cos(arg);
      }
    }
  }
}

int GalerkinBasis::find_velocity(ModeLabel label) const {
  for (int i = 0; i < velocity_.size(); ++i)
    if (velocity_.labels[i] == label) return i;
  return -1;
}

int GalerkinBasis::find_temperature(ModeLabel label) const {
  for (int i = 0; i < temperature_.size(); ++i)
    if (temperature_.labels[i] == label) return i;
  return -1;
}

GalerkinBasis GalerkinBasis::subset(const std::vector<int>& velocity_indices,
                                    const std::vector<int>& temperature_indices) const {
  return GalerkinBasis(domain_, spec_, vertical_, velocity_.select(velocity_indices),
                       temperature_.select(temperature_indices));
}

}  // namespace benard
