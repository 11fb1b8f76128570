#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/data/consistency_set.h"
#include "ddccm/dualprog/dual_program.h"
#include "ddccm/polyalg/poly_matrix.h"
#include "ddccm/sdp/solver.h"

namespace ddccm {

/// Value of a Gram parametrization: P(x) = (v(x) ⊗ I)' Q (v(x) ⊗ I).
struct GramValue {
  std::vector<Monomial> basis;
  int blockdim{1};
  Eigen::MatrixXd Q;

  Eigen::MatrixXd Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  PolyMatrix ToPolyMatrix(int num_vars) const;
};

/// Residuals of the dual conditions for a concrete certificate.
struct ConditionReport {
  /// Max |coefficient| of the zero-constraint identities.
  double zero_residual{0.0};
  /// Max |coefficient| of sum_j dW/dx_j g_j over the columns g of G.
  double orthogonal_residual{0.0};
  /// Max |coefficient| of the positivity matrix minus t I minus its Gram
  /// and box-multiplier terms.
  double positivity_identity{0.0};
  /// Smallest eigenvalue of the positivity and box-multiplier Grams.
  double positivity_min_eig{0.0};
  /// Max |coefficient| of W minus t I minus its Gram.
  double metric_identity{0.0};
  double metric_min_eig{0.0};
  /// Smallest eigenvalue over all multiplier Gram matrices.
  double multiplier_min_eig{0.0};
};

struct SolverStats {
  SolveStatus status{SolveStatus::kNumericalFailure};
  int iterations{0};
  double wall_time{0.0};
  double primal_linf{0.0};
  double dual_rel{0.0};
  double gap{0.0};
  std::string message;
};

/// W, rho and the multipliers mu_a(x, y) = y' N_a(x) y satisfying the dual
/// conditions at rate lambda:
///   W = Gram(W_gram) + t I,
///   -2 lambda W + rho G G' - sum_a d_a N_a
///       = Gram(positivity_gram) + sum_j (r^2 - x_j^2) Gram(S_j) + t I.
/// The S_j terms are present only for a box region of radius r > 0, in which
/// case contraction is certified on that box only.
struct Certificate {
  int n{0};
  double lambda{0.0};
  int deg_w{0};
  int deg_mu_x{0};
  int deg_rho{0};
  /// Margin the program was solved for.
  double margin{0.0};
  /// Optimal t of the deciding solve (normalized units).
  double optimal_t{0.0};
  /// Shift t of W and of the positivity matrix in the stored scaling.
  double t{0.0};
  MonomialDictionary dict;
  Eigen::MatrixXd G;

  PolyMatrix W;
  GramValue W_gram;
  /// Zero polynomial when G = 0.
  Polynomial rho;
  /// Indexed by ConsistencySet::Index.
  std::vector<GramValue> multipliers;
  GramValue positivity_gram;
  /// Box radius r; 0 certifies on all of R^n.
  double region_radius{0.0};
  /// Box multipliers S_j; empty when region_radius is 0.
  std::vector<GramValue> region_multipliers;

  ConditionReport before;
  ConditionReport after;
  /// Coefficients of W and rho set to zero by pruning.
  int pruned_coefficients{0};
  /// False when pruning lost a margin and the unpruned values were kept.
  bool pruning_applied{false};
  SolverStats solver;

  double Mu(int a, const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& y) const;
};

class CertificateRejected : public std::runtime_error {
 public:
  CertificateRejected(const std::string& what, ConditionReport report)
      : std::runtime_error(what), report_(report) {}
  const ConditionReport& report() const { return report_; }

 private:
  ConditionReport report_;
};

struct ExtractOptions {
  /// Coefficients of W and rho below this magnitude are zeroed after W is
  /// scaled to unit largest coefficient.
  double prune_tol{1e-5};
  /// Accepted zero-constraint and G-orthogonality residual.
  double residual_tol{1e-6};
  /// Accepted negative eigenvalue of a Gram matrix, relative to its norm.
  double psd_tol{1e-9};
};

/// Reconstructs, prunes, repairs and re-verifies a certificate. Pruning is
/// followed by a projection onto the G-orthogonality constraints and a
/// least-norm repair of the zero constraint through the multipliers; if a
/// margin is lost the unpruned values are used instead. Throws
/// CertificateRejected when neither variant satisfies the conditions.
Certificate ExtractCertificate(const DualProgram& program,
                               const ConsistencySet& set,
                               const ConicSolution& solution,
                               const ExtractOptions& options = {});

ConditionReport CheckConditions(const Certificate& cert,
                                const ConsistencySet& set);

/// The positivity matrix -2 lambda W + rho G G' - sum_a d_a N_a.
PolyMatrix PositivityMatrix(const Certificate& cert, const ConsistencySet& set);

/// sum_j (r^2 - x_j^2) Gram(S_j); zero without a region.
PolyMatrix RegionTerm(const Certificate& cert);

/// True when every |x_j| <= region_radius, or there is no region.
bool InRegion(const Certificate& cert, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Deterministic JSON text (fixed key order, 17 significant digits).
std::string CertificateToJson(const Certificate& cert);
Certificate CertificateFromJson(const std::string& text);

}  // namespace ddccm
