#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "benard/quadrature.hpp"

namespace benard {

enum class BoundaryMode { FreeSlip, NoSlip };

std::string to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(const std::string& text);

/// Strip (0, l) x (0, 1), periodic in x1. Grid sizes of 0 are chosen automatically
/// from the basis cutoffs.
struct Domain {
  double length = 2.0 * 3.14159265358979323846;
  int grid_x1 = 0;
  int grid_x2 = 0;
};

struct BasisSpec {
  int max_k1 = 4;
  int max_k2 = 4;
  /// Vertical velocity modes kept for every horizontal wavenumber.
  int velocity_modes = 4;
  BoundaryMode bc = BoundaryMode::FreeSlip;
  /// Dimension of the polynomial space used for the no-slip eigenproblem (0 = auto).
  int profile_resolution = 0;
};

/// Signed horizontal wavenumber (k1 > 0: cosine, k1 < 0: sine) and the vertical index
/// (k2 for temperature, eigenmode number m for velocity; both 1-based).
struct ModeLabel {
  int k1 = 0;
  int index = 1;
  bool operator==(const ModeLabel&) const = default;
};

/// One family of modes sampled on the vertical quadrature nodes. A mode is
/// X(x1) * profile(x2) where X is the normalised cos/sin of the given harmonic.
/// For velocity, component 2 carries the opposite x1 parity of component 1.
struct ModeSet {
  std::vector<ModeLabel> labels;
  Eigen::VectorXd eigenvalues;
  std::vector<int> harmonic;
  std::vector<int> parity;  // 0: cos, 1: sin
  Eigen::MatrixXd profile1, dz_profile1;
  Eigen::MatrixXd profile2, dz_profile2;
  bool vector_valued = false;

  int size() const { return static_cast<int>(labels.size()); }
  bool is_vector() const { return vector_valued; }
  /// Stable ordering: ascending eigenvalue, then |k1|, cosine before sine, then index.
  void sort();
  ModeSet select(const std::vector<int>& indices) const;
};

int required_grid_x1(int max_k1);
int required_grid_x2(const BasisSpec& spec);
int auto_profile_resolution(const BasisSpec& spec);

/// Temperature eigenmodes of the Dirichlet-periodic Laplacian:
/// X_k1(x1) * sqrt(2) sin(pi k2 x2), eigenvalue (2 pi k1 / l)^2 + (pi k2)^2.
ModeSet build_temperature_modes(const Domain& domain, const VerticalQuadrature& vertical,
                                int max_k1, int max_k2);

/// Divergence-free Stokes modes. Free slip is analytic; no slip solves the
/// fourth-order streamfunction eigenproblem per horizontal wavenumber.
ModeSet build_velocity_modes(const Domain& domain, const VerticalQuadrature& vertical,
                             int max_k1, int modes_per_k1, BoundaryMode bc,
                             int profile_resolution);

/// Eigenpairs of (D^2 - a^2)^2 f = lambda (a^2 - D^2) f on (0, 1) with f = f' = 0 at
/// both walls, from a Galerkin solve in a Legendre-based space of the given dimension.
struct ChannelEigen {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd coefficients;  // columns normalised to |f'|^2 + a^2 |f|^2 = 1
  int resolution = 0;
  double alpha = 0.0;
  /// f, f', f'' at points in [0, 1] for eigenfunction `mode`.
  void evaluate(int mode, const std::vector<double>& z, Eigen::VectorXd& f,
                Eigen::VectorXd& df, Eigen::VectorXd& ddf) const;
};
ChannelEigen solve_channel_stokes(double alpha, int count, int resolution);

class GalerkinBasis {
 public:
  GalerkinBasis(Domain domain, BasisSpec spec, VerticalQuadrature vertical,
                ModeSet velocity, ModeSet temperature);

  static GalerkinBasis build(const Domain& domain, const BasisSpec& spec);

  const Domain& domain() const { return domain_; }
  const BasisSpec& spec() const { return spec_; }
  const VerticalQuadrature& vertical() const { return vertical_; }
  const ModeSet& velocity() const { return velocity_; }
  const ModeSet& temperature() const { return temperature_; }

  int velocity_size() const { return velocity_.size(); }
  int temperature_size() const { return temperature_.size(); }
  int size() const { return velocity_size() + temperature_size(); }
  /// Eigenvalues of (A1, A2) in state order: velocity modes first.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double min_eigenvalue() const { return eigenvalues_.minCoeff(); }

  int grid_x1() const { return domain_.grid_x1; }
  int grid_x2() const { return vertical_.size(); }
  double x1_weight() const { return domain_.length / domain_.grid_x1; }
  double x1_node(int j) const { return j * x1_weight(); }
  int harmonic_count() const { return spec_.max_k1 + 1; }
  /// Rows 2k (cos) and 2k+1 (sin) of the normalised horizontal functions on the grid.
  const Eigen::MatrixXd& x1_table() const { return x1_table_; }
  const Eigen::MatrixXd& x1_derivative_table() const { return x1_dtable_; }

  int find_velocity(ModeLabel label) const;
  int find_temperature(ModeLabel label) const;

  /// Galerkin space spanned by a subset of the modes (same grid and cutoffs).
  GalerkinBasis subset(const std::vector<int>& velocity_indices,
                       const std::vector<int>& temperature_indices) const;

 private:
  void finish();

  Domain domain_;
  BasisSpec spec_;
  VerticalQuadrature vertical_;
  ModeSet velocity_;
  ModeSet temperature_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd x1_table_;
  Eigen::MatrixXd x1_dtable_;
};

}  // namespace benard
