#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ddccm/data/consistency_set.h"
#include "ddccm/sdp/conic_program.h"
#include "ddccm/sos/gram.h"

namespace ddccm {

struct DualProgramOptions {
  /// Contraction rate, 1/s.
  double lambda{0.1};
  /// Total degree of W: 0 or 2.
  int deg_w{0};
  /// Degree in x of the multipliers; -1 selects the minimum 2q + p - 1.
  int deg_mu_x{-1};
  /// Degree of rho; -1 selects deg_mu_x rounded up to even.
  int deg_rho{-1};
  /// Drop actuated coordinates from the W basis when a column of G is a
  /// multiple of a unit vector.
  bool facial_reduction{true};
  /// Required margin: the program is feasible when its optimal t >= margin.
  double margin{1e-6};
  /// When set (>= 0), t is fixed to this value and the objective is dropped,
  /// so the solver returns a well-centered interior point.
  double fixed_t{-1.0};
  /// When positive, positivity is only required on the box |x_j| <= radius,
  /// through multipliers (radius^2 - x_j^2) S_j(x) with S_j matrix-SOS.
  /// Zero requires it on all of R^n.
  double region_radius{0.0};
};

/// Gram and row counts of an assembled program.
struct SizeReport {
  int n{0};
  int q{0};
  int T{0};
  int L{0};
  /// n * C(n + q, q).
  int w_gram_nominal{0};
  /// After facial reduction.
  int w_gram_effective{0};
  /// 2nT.
  int num_multipliers{0};
  int multiplier_gram_dim{0};
  int positivity_gram_dim{0};
  /// Gram size of each box multiplier S_j; 0 without a region.
  int region_gram_dim{0};
  int rho_terms{0};
  int rows_positivity{0};
  int rows_zero{0};
  int rows_orthogonal{0};
  int num_rows{0};
  int num_blocks{0};
};

/// Compiled dual conditions. With W = Gram(S_W) + t I and
///   -2 lambda W + rho G G' - sum_a d_a N_a
///       = Gram(S_0) + sum_j (r^2 - x_j^2) Gram(S_j) + t I,
/// where the S_j terms appear only for a box region of radius r,
/// the program minimizes -t subject to the coefficient identities of the
/// zero constraint and the G-orthogonality condition, all Gram blocks PSD,
/// and the normalization sum of traces + 2 n t = 1. Every term is
/// homogeneous in (W, rho, N), so t > 0 exactly when a strictly feasible
/// certificate exists.
struct DualProgram {
  ConicProgram program;
  DualProgramOptions options;
  SizeReport sizes;

  int n{0};
  int q{0};
  int deg_mu_x{0};
  int deg_rho{0};
  /// Variables W may depend on.
  std::vector<int> w_vars;

  GramBlock w_gram;
  /// Free variable t.
  int t_var{-1};
  /// rho = sum_k w[rho_vars[k]] * rho_basis[k]; empty when G = 0.
  std::vector<Monomial> rho_basis;
  std::vector<int> rho_vars;
  /// Indexed by ConsistencySet::Index.
  std::vector<GramBlock> multipliers;
  GramBlock positivity_gram;
  /// Box multipliers S_j, one per state; empty without a region.
  std::vector<GramBlock> region_grams;

  LinearConstraintSet positivity_rows;
  LinearConstraintSet zero_rows;
  LinearConstraintSet orthogonal_rows;
  int normalization_row{-1};

  /// W = Gram(S_W) + t I as a symbolic matrix.
  SymbolicPolyMatrix W;
};

/// 2q + p - 1 clamped at 0.
int MinimumMultiplierDegree(int p, int q);

/// Actuated coordinates j whose column of G is a multiple of e_j.
std::vector<int> AlignedActuatedVariables(const Eigen::MatrixXd& G);

/// Throws std::invalid_argument on an empty set, deg_w not in {0, 2}, a
/// multiplier degree below the minimum, or a negative lambda or margin.
DualProgram Assemble(const ConsistencySet& set,
                     const DualProgramOptions& options);

}  // namespace ddccm
