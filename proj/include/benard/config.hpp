#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "benard/basis.hpp"
#include "benard/integrators.hpp"
#include "benard/ldp.hpp"
#include "benard/noise.hpp"

namespace benard {

/// A mode reference "k1:index" and a coefficient, e.g. "1:1:0.5".
struct ModeValue {
  ModeLabel label;
  double value = 0.0;
};

struct FieldSpec {
  std::string kind = "zero";  // zero | modes | random
  std::vector<ModeValue> velocity;
  std::vector<ModeValue> temperature;
  double amplitude = 1.0;  // random: overall scale
  double decay = 1.0;      // random: spectral decay
};

/// Everything a subcommand needs. Field names mirror the configuration keys
/// (section.key); see README for the grammar.
struct RunConfig {
  Domain domain;
  BasisSpec basis;
  std::vector<ModeLabel> velocity_subset;     // empty: keep all
  std::vector<ModeLabel> temperature_subset;  // empty: keep all
  PhysicsParams physics;
  double noise_amplitude = 1.0;
  double noise_decay = 2.0;
  std::vector<double> noise_lambdas;  // explicit list overrides the decay law
  SigmaFamily sigma_family = SigmaFamily::Additive;
  std::vector<double> sigma_params{1.0};
  IntegratorConfig integrator;
  FieldSpec initial;
  FieldSpec control;  // constant-in-time control (kind zero | modes)
  double ldp_M = 1.0;  // S_M level used in the eps0 guard

  // mam
  TargetKind mam_target = TargetKind::Terminal;
  FieldSpec mam_terminal;
  double mam_tolerance = 1e-3;
  double mam_radius = 0.1;
  MamSettings mam;

  // weakconv / mcldp / increments / compactness
  std::vector<double> weakconv_eps{1e-1, 1e-2, 1e-3, 1e-4};
  int weakconv_paths = 200;
  std::vector<double> mcldp_eps{0.5, 0.25, 0.125};
  double mcldp_radius = 0.5;
  int mcldp_paths = 1000;
  int increments_paths = 200;
  int increments_levels = 8;
  double increments_N = 1e6;
  std::vector<int> compactness_n{4, 8, 16, 32, 64};
  double compactness_amplitude = 1.0;
  FieldSpec compactness_g;

  // diagnostics
  int diagnostics_samples = 1000;

  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Canonical "key = value" lines (sorted), used in the manifest.
  std::map<std::string, std::string> echo;
};

/// Parse an INI-style file. Unknown sections or keys are rejected with their key path.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Basis after applying the optional subsets.
GalerkinBasis make_basis(const RunConfig& cfg, const std::string& cache_path = "");
CovarianceSpec make_covariance(const RunConfig& cfg, const GalerkinBasis& basis);
NoiseModel make_noise(const RunConfig& cfg, const GalerkinBasis& basis);
Vec make_field(const FieldSpec& spec, const GalerkinBasis& basis, std::uint64_t seed);

}  // namespace benard
