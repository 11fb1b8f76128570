#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/controller/controller.h"
#include "ddccm/data/consistency_set.h"
#include "ddccm/dualprog/certificate.h"
#include "ddccm/sim/simulate.h"

namespace ddccm {

/// Thrown when the phase-I program finds no point of the consistency set.
class EmptyConsistencySet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlantSamples {
  /// Every entry passes CheckMembership.
  std::vector<Eigen::MatrixXd> plants;
  /// Phase-I point and the uniform slack it keeps on every constraint.
  Eigen::MatrixXd center;
  double center_slack{0.0};
  int vertex_samples{0};
  int walk_samples{0};
};

struct SamplerOptions {
  int burn_in{100};
  /// Add LP optima along 2nL random objective directions.
  bool include_vertices{true};
};

/// `count` hit-and-run samples (each after `burn_in` walk steps) started
/// from the phase-I point, plus the LP vertex extremes. count = 0 returns no
/// plants. Deterministic in (set, count, seed). Throws EmptyConsistencySet.
PlantSamples SampleConsistentPlants(const ConsistencySet& set, int count,
                                    std::uint64_t seed,
                                    const SamplerOptions& options = {});

/// Points of a uniform grid with `per_axis` points on [-radius, radius]^n.
std::vector<Eigen::VectorXd> BoxGrid(int n, double radius, int per_axis);

/// dW/dt along xdot = F phi(x): sum_j dW/dx_j (F phi(x))_j. The G u term
/// drops out under the G-orthogonality condition.
Eigen::MatrixXd MetricDerivative(const Certificate& cert, const Eigen::MatrixXd& F,
                                 const Eigen::Ref<const Eigen::VectorXd>& x);

/// -Wdot + W A' + A W + 2 lambda W - rho G G' with A = F dphi/dx.
Eigen::MatrixXd ContractionMatrix(const Certificate& cert, const Eigen::MatrixXd& F,
                                  const Eigen::Ref<const Eigen::VectorXd>& x);

struct ContractionReport {
  int points{0};
  /// Largest eigenvalue of ContractionMatrix over the grid; pass iff < 0.
  double max_eig{-std::numeric_limits<double>::infinity()};
  /// Largest eigenvalue of J'M + M J + Mdot + 2 lambda M with M = W^{-1} and
  /// the closed-loop Jacobian J = A + G K.
  double max_eig_metric_form{-std::numeric_limits<double>::infinity()};
  /// Both forms have the same sign at every grid point.
  bool forms_agree{true};
  Eigen::VectorXd worst_x;
  bool pass{false};
};

ContractionReport CheckContraction(const Certificate& cert, const Eigen::MatrixXd& F,
                                   const std::vector<Eigen::VectorXd>& grid);

struct DualConditionReport {
  int points{0};
  /// min over points of y' P(x) y with P the positivity matrix; must be > 0.
  double min_positivity{std::numeric_limits<double>::infinity()};
  /// Largest |entry| of the zero-constraint vector at (x, y); <= 1e-6.
  double max_zero_residual{0.0};
  /// Largest coefficient of sum_j dW/dx_j G_jc; <= 1e-8.
  double max_orthogonal_coefficient{0.0};
  /// Smallest mu_a(x, y); >= -1e-9.
  double min_mu{std::numeric_limits<double>::infinity()};
  /// Smallest eigenvalue of W(x) and the bound t implied by W = Gram + t I.
  double min_metric_eig{std::numeric_limits<double>::infinity()};
  double metric_bound{0.0};
  bool positivity_pass{false};
  bool zero_pass{false};
  bool orthogonal_pass{false};
  bool mu_pass{false};
  bool metric_pass{false};
  bool pass{false};
};

/// Rechecks the dual conditions at `points` random (x, unit y), x uniform in
/// [-box, box]^n (clipped to the certificate's region).
DualConditionReport CheckDualConditions(const Certificate& cert,
                                        const ConsistencySet& set,
                                        std::uint64_t seed, int points = 500,
                                        double box = 2.0);

/// sqrt of the minimized discretized geodesic energy from 0 to x.
double RiemannDistance(const Certificate& cert,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       const GeodesicOptions& options = {});

/// Largest |MetricDerivative - central difference of W(x(t))| along a
/// trajectory (interior output times), relative to 1 + |W|.
double MetricDerivativeFdError(const Certificate& cert, const Eigen::MatrixXd& F,
                               const Trajectory& traj);

struct VerifyOptions {
  int plant_samples{200};
  int grid_per_axis{7};
  double box{2.0};
  int dual_points{500};
  std::uint64_t seed{1};
  /// Checked in addition to the samples when given.
  std::optional<Eigen::MatrixXd> F_true;
};

struct VerificationReport {
  std::uint64_t seed{0};
  /// Box actually used (clipped to the certificate's region).
  double box{0.0};
  int grid_points{0};
  int plants_checked{0};
  int vertex_samples{0};
  int walk_samples{0};
  bool sampler_ok{false};
  std::string sampler_error;
  bool true_plant_checked{false};
  bool true_plant_pass{false};
  double true_plant_max_eig{0.0};
  /// Worst over every checked plant.
  double worst_contraction_eig{-std::numeric_limits<double>::infinity()};
  double worst_metric_form_eig{-std::numeric_limits<double>::infinity()};
  bool forms_agree{true};
  int failing_plants{0};
  bool contraction_pass{false};
  DualConditionReport dual;
  bool pass{false};
};

/// A pure function of (certificate, set, options).
VerificationReport Verify(const Certificate& cert, const ConsistencySet& set,
                          const VerifyOptions& options = {});

std::string ReportToJson(const VerificationReport& report);
std::string ReportToText(const VerificationReport& report);

}  // namespace ddccm
