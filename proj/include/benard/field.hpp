#pragma once

#include <Eigen/Dense>

#include "benard/basis.hpp"

namespace benard {

/// Coefficients of phi = (u, theta) in the Galerkin basis, velocity block first.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int velocity_size, int temperature_size)
      : values_(Eigen::VectorXd::Zero(velocity_size + temperature_size)), n_vel_(velocity_size) {}
  SpectralField(Eigen::VectorXd values, int velocity_size)
      : values_(std::move(values)), n_vel_(velocity_size) {}

  static SpectralField zeros(const GalerkinBasis& basis) {
    return {basis.velocity_size(), basis.temperature_size()};
  }

  int velocity_size() const { return n_vel_; }
  int temperature_size() const { return static_cast<int>(values_.size()) - n_vel_; }
  int size() const { return static_cast<int>(values_.size()); }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  auto u() { return values_.head(n_vel_); }
  auto u() const { return values_.head(n_vel_); }
  auto theta() { return values_.tail(temperature_size()); }
  auto theta() const { return values_.tail(temperature_size()); }

  bool all_finite() const { return values_.allFinite(); }
  /// Throws ShapeError unless the block sizes match the basis.
  void check(const GalerkinBasis& basis) const;

 private:
  Eigen::VectorXd values_;
  int n_vel_ = 0;
};

/// Grid values of (u1, u2, theta); each matrix is (vertical nodes) x (horizontal nodes).
struct PhysicalField {
  Eigen::MatrixXd u1;
  Eigen::MatrixXd u2;
  Eigen::MatrixXd theta;
};

}  // namespace benard
