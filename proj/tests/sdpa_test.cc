#include <gtest/gtest.h>

#include "ddccm/sdp/backend.h"
#include "ddccm/sdp/sdpa.h"
#include "ddccm/sdp/solver.h"

namespace ddccm {
namespace {

// min Tr(X) + w  s.t.  X00 + w = 2,  X01 = 0.5,  w >= ... via X11 - w = 0.
ConicProgram SmallProgram() {
  ConicProgram p;
  const int b = p.AddPsdBlock(2);
  const int w = p.AddFreeVariable("w");
  const int x00 = p.AddAtom(b, {{0, 0, 1.0}});
  const int x01 = p.AddAtom(b, {{0, 1, 0.5}});
  const int x11 = p.AddAtom(b, {{1, 1, 1.0}});
  const int tr = p.AddAtom(b, {{0, 0, 1.0}, {1, 1, 1.0}});
  const int r0 = p.AddRow(2.0);
  p.AddAtomCoefficient(r0, x00, 1.0);
  p.AddFreeCoefficient(r0, w, 1.0);
  p.AddAtomCoefficient(p.AddRow(0.5), x01, 1.0);
  const int r2 = p.AddRow(0.0);
  p.AddAtomCoefficient(r2, x11, 1.0);
  p.AddFreeCoefficient(r2, w, -1.0);
  p.AddObjectiveAtom(tr, 1.0);
  p.AddObjectiveFree(w, 1.0);
  return p;
}

TEST(SdpaTest, ExactText) {
  ConicProgram p;
  const int b = p.AddPsdBlock(2);
  p.AddAtomCoefficient(p.AddRow(1.0), p.AddAtom(b, {{0, 0, 1.0}}), 1.0);
  p.AddObjectiveAtom(p.AddAtom(b, {{0, 0, 1.0}, {1, 1, 1.0}}), 1.0);
  EXPECT_EQ(WriteSdpa(p),
            "\"exported conic program\n1\n1\n2\n1\n"
            "0 1 1 1 -1\n0 1 2 2 -1\n1 1 1 1 1\n");
}

TEST(SdpaTest, RoundTripPreservesOptimalValue) {
  const ConicProgram p = SmallProgram();
  const ConicSolution direct = Solve(p);
  ASSERT_EQ(direct.status, SolveStatus::kFeasible) << direct.message;
  const ConicProgram q = ReadSdpa(WriteSdpa(p));
  EXPECT_EQ(q.num_rows(), p.num_rows());
  EXPECT_EQ(q.num_blocks(), p.num_blocks() + 2);  // LP pair becomes 1x1 blocks
  const ConicSolution imported = Solve(q);
  ASSERT_EQ(imported.status, SolveStatus::kFeasible) << imported.message;
  EXPECT_NEAR(direct.residuals.primal_objective,
              imported.residuals.primal_objective, 1e-6);
  // Re-export of the imported program is stable.
  EXPECT_EQ(WriteSdpa(ReadSdpa(WriteSdpa(q))), WriteSdpa(q));
}

TEST(SdpaTest, SolutionRoundTrip) {
  const ConicProgram p = SmallProgram();
  const ConicSolution s = Solve(p);
  const ConicSolution back = ReadSdpaSolution(p, WriteSdpaSolution(p, s));
  EXPECT_LT((back.X[0] - s.X[0]).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((back.Z[0] - s.Z[0]).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((back.w - s.w).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((back.y - s.y).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SdpaTest, MalformedInputThrows) {
  EXPECT_THROW(ReadSdpa("1\n1\n2\n"), std::runtime_error);
  EXPECT_THROW(ReadSdpa("1\n1\n2\n1\n1 1 3 3 1\n"), std::runtime_error);
  EXPECT_THROW(ReadSdpa("1\n1\n-2\n1\n1 1 1 2 1\n"), std::runtime_error);
}

TEST(BackendTest, ExternalToolMatchesEmbedded) {
  const ConicProgram p = SmallProgram();
  const auto embedded = MakeBackend("embedded");
  const auto external = MakeBackend(std::string("external:") + DDCCM_SDP_SOLVE +
                                    " {problem} {solution} > /dev/null");
  const SolverOptions opts;
  const ConicSolution a = embedded->Solve(p, opts);
  const ConicSolution b = external->Solve(p, opts);
  ASSERT_EQ(b.status, SolveStatus::kFeasible) << b.message;
  EXPECT_NEAR(a.residuals.primal_objective, b.residuals.primal_objective, 1e-6);
  EXPECT_LE(b.residuals.primal_linf, 1e-7);
}

TEST(BackendTest, ExternalFailureIsNumericalFailure) {
  const auto bad = MakeBackend("external:false {problem} {solution}");
  const ConicSolution s = bad->Solve(SmallProgram(), {});
  EXPECT_EQ(s.status, SolveStatus::kNumericalFailure);
  EXPECT_THROW(MakeBackend("external:no-placeholders"), std::invalid_argument);
  EXPECT_THROW(MakeBackend("mystery"), std::invalid_argument);
}

}  // namespace
}  // namespace ddccm
