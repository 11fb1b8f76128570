#include "ddccm/dualprog/synthesis.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddccm {

namespace {

ConicSolution RunSolver(const ConicProgram& p, const SynthesisOptions& o) {
  if (o.backend) return o.backend->Solve(p, o.solver);
  return Solve(p, o.solver);
}

}  // namespace

std::string ToString(ProbeOutcome outcome) {
  switch (outcome) {
    case ProbeOutcome::kFeasible:
      return "feasible";
    case ProbeOutcome::kInfeasibleCertified:
      return "infeasible-certified";
    case ProbeOutcome::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

LambdaProbe ClassifyProbe(const DualProgram& dp, const ConicSolution& sol) {
  LambdaProbe probe;
  probe.lambda = dp.options.lambda;
  probe.solver_status = sol.status;
  probe.iterations = sol.iterations;
  probe.wall_time = sol.wall_time;
  probe.message = sol.message;
  probe.dual_bound = std::numeric_limits<double>::quiet_NaN();
  const double margin = dp.options.margin;
  if (sol.status == SolveStatus::kInfeasibleCertified) {
    probe.outcome = ProbeOutcome::kInfeasibleCertified;
    return probe;
  }
  const bool has_point = sol.w.size() == dp.program.num_free() &&
                         static_cast<int>(sol.X.size()) == dp.program.num_blocks();
  if (!has_point) return probe;
  probe.optimal_t = sol.w(dp.t_var);
  const SolveResiduals& r = sol.residuals;
  // min -t has dual objective b'y <= -t for every primal feasible point.
  if (std::isfinite(r.dual_objective)) probe.dual_bound = -r.dual_objective;
  const bool primal_ok = r.primal_linf <= 1e-6 && r.min_eig_X >= -1e-8;
  const bool dual_ok = std::isfinite(r.dual_objective) && r.dual_rel <= 1e-6 &&
                       r.min_eig_Z >= -1e-8;
  if (primal_ok && probe.optimal_t >= margin) {
    probe.outcome = ProbeOutcome::kFeasible;
  } else if (dual_ok && probe.dual_bound < margin) {
    probe.outcome = ProbeOutcome::kInfeasibleCertified;
    probe.message += "; dual bound on t below margin";
  }
  return probe;
}

LambdaProbe ProbeLambda(const ConsistencySet& set, double lambda,
                        const SynthesisOptions& options,
                        DualProgram* program_out, ConicSolution* solution_out) {
  DualProgramOptions po = options.program;
  po.lambda = lambda;
  po.fixed_t = -1.0;
  DualProgram dp = Assemble(set, po);
  ConicSolution sol = RunSolver(dp.program, options);
  const LambdaProbe probe = ClassifyProbe(dp, sol);
  if (program_out) *program_out = std::move(dp);
  if (solution_out) *solution_out = std::move(sol);
  return probe;
}

SynthesisResult BisectLambda(const ConsistencySet& set,
                             const SynthesisOptions& options) {
  if (!(options.lambda_lo > 0.0) || !(options.lambda_hi >= options.lambda_lo)) {
    throw std::invalid_argument("lambda range must satisfy 0 < lo <= hi");
  }
  SynthesisResult result;
  DualProgram best_dp;
  ConicSolution best_sol;
  LambdaProbe best;
  bool have_best = false;

  auto probe = [&](double lambda) {
    DualProgram dp;
    ConicSolution sol;
    LambdaProbe p = ProbeLambda(set, lambda, options, &dp, &sol);
    result.sizes = dp.sizes;
    result.probes.push_back(p);
    if (p.outcome == ProbeOutcome::kFeasible &&
        (!have_best || lambda > best.lambda)) {
      best_dp = std::move(dp);
      best_sol = std::move(sol);
      best = p;
      have_best = true;
    }
    return p.outcome == ProbeOutcome::kFeasible;
  };

  if (!probe(options.lambda_lo)) {
    result.outcome = result.probes.back().outcome;
    return result;
  }
  if (options.lambda_hi > options.lambda_lo && !probe(options.lambda_hi)) {
    double lo = options.lambda_lo, hi = options.lambda_hi;
    for (int it = 0; it < options.max_iterations &&
                     hi - lo > options.tolerance_fraction * options.lambda_hi;
         ++it) {
      const double mid = 0.5 * (lo + hi);
      (probe(mid) ? lo : hi) = mid;
    }
  }
  result.outcome = ProbeOutcome::kFeasible;

  std::string recenter_error;
  if (options.recenter) {
    DualProgramOptions po = options.program;
    po.lambda = best.lambda;
    po.fixed_t = 0.5 * best.optimal_t;
    const DualProgram dp = Assemble(set, po);
    const ConicSolution sol = RunSolver(dp.program, options);
    if (sol.status == SolveStatus::kFeasible) {
      try {
        Certificate cert = ExtractCertificate(dp, set, sol, options.extract);
        cert.optimal_t = best.optimal_t;
        result.certificate = std::move(cert);
        return result;
      } catch (const CertificateRejected& e) {
        recenter_error = std::string("recentered: ") + e.what() + "; ";
      }
    } else {
      recenter_error = "recentering solve: " + sol.message + "; ";
    }
  }
  try {
    result.certificate =
        ExtractCertificate(best_dp, set, best_sol, options.extract);
  } catch (const CertificateRejected& e) {
    result.extraction_error = recenter_error + e.what();
  }
  return result;
}

}  // namespace ddccm
