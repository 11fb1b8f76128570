#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/sdp/conic_program.h"

namespace ddccm {

enum class SolveStatus { kFeasible, kInfeasibleCertified, kNumericalFailure };

std::string ToString(SolveStatus status);

struct SolverOptions {
  /// Bound on the l-infinity norm of the primal equality residual and on the
  /// relative dual residual.
  double feasibility_tol{1e-7};
  double gap_tol{1e-8};
  int max_iterations{200};
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction{0.95};
  /// Run the big-M phase-I program when the direct solve fails.
  bool phase_one{true};
  /// Trace bound M for phase-I; <= 0 picks max(1e4, 100 * total dimension).
  double phase_one_radius{0.0};
  bool verbose{false};
};

struct SolveResiduals {
  /// max_r |b_r - (A(X) + G w)_r|.
  double primal_linf{0.0};
  /// ||C - A*(y) - Z||_F / (1 + ||C||_F), combined with the free-variable
  /// residual |c_w - G' y|_inf / (1 + |c_w|_inf).
  double dual_rel{0.0};
  double min_eig_X{0.0};
  double min_eig_Z{0.0};
  double primal_objective{0.0};
  double dual_objective{0.0};
  /// |pobj - dobj| / (1 + |pobj| + |dobj|).
  double gap{0.0};
};

/// y with -A*(y) - y_M I PSD on every block, G' y = 0, y_M <= 0 and
/// b'y + M y_M > 0. No X with A(X) + G w = b, X PSD and total trace <= M
/// exists; when y_M = 0 the program is infeasible outright.
struct FarkasCertificate {
  Eigen::VectorXd y;
  double y_radius{0.0};
  double radius{0.0};
  /// b'y + M y_M; certificates built by Solve are normalized to 1.
  double value{0.0};
  bool global{false};
};

struct ConicSolution {
  SolveStatus status{SolveStatus::kNumericalFailure};
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  Eigen::VectorXd w;
  Eigen::VectorXd y;
  SolveResiduals residuals;
  int iterations{0};
  double wall_time{0.0};
  std::optional<FarkasCertificate> farkas;
  std::string message;
};

/// Infeasible-start primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector). Falls back to a big-M phase-I program to certify
/// infeasibility when the direct solve does not converge.
ConicSolution Solve(const ConicProgram& program,
                    const SolverOptions& options = {});

/// Recomputes every residual from the program definition.
SolveResiduals ComputeResiduals(const ConicProgram& program,
                                const ConicSolution& solution);

/// Largest violation of the certificate's defining conditions, with
/// b'y + M y_M <= 0 measured as its negation. Solve accepts certificates
/// whose violation is at most 1e-9. Reports the failing condition in `why`.
double FarkasViolation(const ConicProgram& program,
                       const FarkasCertificate& cert,
                       std::string* why = nullptr);

/// Smallest eigenvalue over the given symmetric blocks (+inf when empty).
double MinEigenvalue(const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace ddccm
