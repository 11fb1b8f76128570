#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/dualprog/synthesis.h"
#include "ddccm/polyalg/poly_matrix.h"
#include "ddccm/sim/simulate.h"
#include "ddccm/verify/verify.h"

namespace ddccm {

/// Schema or validation error in a pipeline configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a pipeline run depends on. All randomness derives from `seed`.
struct PipelineConfig {
  static constexpr int kVersion = 1;

  /// Built-in example the plant was taken from, or empty.
  std::string example;
  std::uint64_t seed{1};

  /// Dataset CSV to read instead of generating one; empty to generate.
  std::string data_path;
  std::string output_dir{"out"};

  MonomialDictionary dict;
  Eigen::MatrixXd G;
  /// Known true plant (examples only); needed by generate and simulate.
  std::optional<Eigen::MatrixXd> F_true;

  /// Empty means "auto": max |xdot|_inf / 15.
  std::optional<double> eps;
  bool finite_difference{false};
  int trajectories{6};
  int samples_per_trajectory{10};
  double data_horizon{2.0};
  double data_box{1.0};
  bool noise{true};

  int deg_w{0};
  int deg_mu_x{-1};
  int deg_rho{-1};
  double lambda_lo{0.01};
  double lambda_hi{1.0};
  int lambda_iterations{8};
  double margin{1e-6};
  double region_radius{0.0};
  bool facial_reduction{true};
  bool recenter{true};

  int plant_samples{200};
  int grid_per_axis{7};
  double verify_box{2.0};
  int dual_points{500};

  int initial_conditions{5};
  double sim_box{1.0};
  double sim_horizon{5.0};
  double sim_step{0.01};

  int geodesic_segments{100};
  /// Target of the `geodesic` command; defaults to all ones.
  std::optional<Eigen::VectorXd> geodesic_target;

  int n() const { return static_cast<int>(G.rows()); }
  std::optional<PolynomialPlant> TruePlant() const;

  /// Throws ConfigError on inconsistent sizes, degrees below the minimum
  /// multiplier degree, bad ranges or a missing data file.
  void Validate() const;

  DatasetOptions Dataset() const;
  SynthesisOptions Synthesis() const;
  VerifyOptions Verification() const;
};

/// Configuration reproducing one of the built-in examples ("linear",
/// "nonlinear2d", "nonlinear3d").
PipelineConfig ExampleConfig(const std::string& name);

/// Canonical JSON (fixed key order). Round-trips through ConfigFromJson.
std::string ConfigToJson(const PipelineConfig& config, int indent = 1);
/// Missing keys take their defaults; the plant defaults to `example`'s.
/// Throws ConfigError on malformed input, an unknown schema version or a
/// failed Validate.
PipelineConfig ConfigFromJson(const std::string& text);
PipelineConfig LoadConfig(const std::string& path);

/// 64-bit FNV-1a of the canonical compact JSON, as 16 hex digits.
std::string ConfigHash(const PipelineConfig& config);
std::uint64_t Fnv1a64(const std::string& bytes);

}  // namespace ddccm
