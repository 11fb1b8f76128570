#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddccm/data/consistency_set.h"
#include "ddccm/dualprog/certificate.h"
#include "ddccm/dualprog/dual_program.h"
#include "ddccm/sdp/backend.h"
#include "ddccm/sdp/solver.h"

namespace ddccm {

enum class ProbeOutcome { kFeasible, kInfeasibleCertified, kNumericalFailure };
std::string ToString(ProbeOutcome outcome);

/// Result of solving the dual program at one lambda.
struct LambdaProbe {
  double lambda{0.0};
  ProbeOutcome outcome{ProbeOutcome::kNumericalFailure};
  /// Optimal t when the solve produced a primal point.
  double optimal_t{0.0};
  /// Upper bound on t from the dual objective (NaN when unavailable).
  double dual_bound{0.0};
  SolveStatus solver_status{SolveStatus::kNumericalFailure};
  int iterations{0};
  double wall_time{0.0};
  std::string message;
};

struct SynthesisOptions {
  /// lambda is overwritten by the search.
  DualProgramOptions program;
  double lambda_lo{0.01};
  double lambda_hi{1.0};
  /// Bisection steps after the end points.
  int max_iterations{8};
  /// Stop once the bracket is narrower than this fraction of lambda_hi.
  double tolerance_fraction{0.05};
  SolverOptions solver;
  ExtractOptions extract;
  /// Re-solve at the chosen lambda with t fixed to half its optimum to
  /// obtain an interior point before extraction.
  bool recenter{true};
  /// Defaults to the embedded solver.
  std::shared_ptr<const SolverBackend> backend;
};

struct SynthesisResult {
  /// Outcome at the best lambda (or at lambda_lo when nothing is feasible).
  ProbeOutcome outcome{ProbeOutcome::kNumericalFailure};
  std::optional<Certificate> certificate;
  /// Set when a feasible lambda was found but extraction failed.
  std::string extraction_error;
  std::vector<LambdaProbe> probes;
  SizeReport sizes;
};

/// Classifies a solve of a max-t program: feasible when t >= margin at a
/// primal point, certified infeasible when the dual bound is below margin.
LambdaProbe ClassifyProbe(const DualProgram& dp, const ConicSolution& sol);

LambdaProbe ProbeLambda(const ConsistencySet& set, double lambda,
                        const SynthesisOptions& options,
                        DualProgram* program_out = nullptr,
                        ConicSolution* solution_out = nullptr);

/// Largest feasible lambda in [lambda_lo, lambda_hi] up to the tolerance,
/// with its certificate.
SynthesisResult BisectLambda(const ConsistencySet& set,
                             const SynthesisOptions& options);

}  // namespace ddccm
