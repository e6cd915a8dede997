#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "benard/basis.hpp"

namespace benard {

// Binary layout shared by the basis cache and snapshot files (all little endian):
//   char[4] "BNRD" | u32 version (= 1) | u32 kind (1 = basis, 2 = snapshots) | payload
//
// basis payload:
//   f64 length | u32 grid_x1 | u32 max_k1 | u32 max_k2 | u32 velocity_modes | u32 bc
//   (0 free slip, 1 no slip) | u32 profile_resolution | u32 nz | f64 nodes[nz] | f64 weights[nz]
//   u32 n_vel, then per velocity mode: i32 k1 | i32 m | f64 eigenvalue |
//       f64 profile1[nz] | f64 dz_profile1[nz] | f64 profile2[nz] | f64 dz_profile2[nz]
//   u32 n_temp, then per temperature mode: i32 k1 | i32 k2 | f64 eigenvalue |
//       f64 profile[nz] | f64 dz_profile[nz]
//
// snapshot payload:
//   u32 n_vel | u32 n_temp | u64 count | count x (f64 t | f64 coeffs[n_vel + n_temp])

inline constexpr std::uint32_t kFileVersion = 1;
inline constexpr std::uint32_t kKindBasis = 1;
inline constexpr std::uint32_t kKindSnapshots = 2;

void save_basis(const GalerkinBasis& basis, const std::string& path);
GalerkinBasis load_basis(const std::string& path);

/// Load `path` if it holds a basis built from the same domain and spec, otherwise
/// build it and (re)write the cache.
GalerkinBasis cached_basis(const Domain& domain, const BasisSpec& spec, const std::string& path);

struct Snapshots {
  int velocity_size = 0;
  int temperature_size = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

void save_snapshots(const Snapshots& snaps, const std::string& path);
Snapshots load_snapshots(const std::string& path);

}  // namespace benard
