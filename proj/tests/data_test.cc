#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddccm/data/consistency_set.h"
#include "ddccm/data/samples.h"

namespace ddccm {
namespace {

Monomial M(std::vector<int> e) { return Monomial(std::move(e)); }

SampleSet SingleSample() {
  SampleSet s;
  s.G = Eigen::Matrix2d::Identity();
  s.eps = 0.1;
  s.dict = MonomialDictionary({M({0, 1}), M({2, 0})});
  SampleRecord r;
  r.x = Eigen::Vector2d(1, 2);
  r.xdot = Eigen::Vector2d(0.5, 1);
  r.u = Eigen::Vector2d::Zero();
  s.records.push_back(r);
  return s;
}

// Independent trace oracle: Tr(F Phi) summed entry by entry.
double TraceOf(const Eigen::MatrixXd& F, const Eigen::MatrixXd& Phi) {
  double t = 0.0;
  for (int i = 0; i < F.rows(); ++i) {
    for (int j = 0; j < F.cols(); ++j) t += F(i, j) * Phi(j, i);
  }
  return t;
}

std::string SixtyRowCsv(bool with_xdot) {
  std::string text = "# dictionary: [[1,0],[0,1]]\n# G: [[1,0],[0,1]]\n";
  text += with_xdot ? "traj,t,x1,x2,xdot1,xdot2,u1,u2\n" : "traj,t,x1,x2,u1,u2\n";
  for (int traj = 0; traj < 6; ++traj) {
    for (int j = 0; j < 10; ++j) {
      const double t = 0.1 * j;
      text += std::to_string(traj) + "," + std::to_string(t) + "," +
              std::to_string(t + traj) + "," + std::to_string(2 * t);
      if (with_xdot) text += ",1,2";
      text += ",0,0\n";
    }
  }
  return text;
}

TEST(LoadSamplesTest, SixtyRows) {
  const SampleSet s = ParseSamples(SixtyRowCsv(true), {});
  EXPECT_EQ(s.num_samples(), 60);
  EXPECT_EQ(s.num_states(), 2);
  EXPECT_EQ(s.num_inputs(), 2);
  EXPECT_DOUBLE_EQ(s.eps, 2.0 / 15.0);
}

TEST(LoadSamplesTest, MissingXdotNeedsFiniteDifferences) {
  EXPECT_THROW(ParseSamples(SixtyRowCsv(false), {}), std::runtime_error);
  LoadOptions opts;
  opts.finite_difference = true;
  const SampleSet s = ParseSamples(SixtyRowCsv(false), opts);
  for (const auto& r : s.records) {
    EXPECT_NEAR(r.xdot(0), 1.0, 1e-9);
    EXPECT_NEAR(r.xdot(1), 2.0, 1e-9);
  }
}

TEST(LoadSamplesTest, HeaderDictionary) {
  const std::string text =
      "# dictionary: [[0,1],[2,0]]\n# G: [[1],[0]]\n# eps: 0.25\n"
      "traj,t,x1,x2,xdot1,xdot2,u1\n0,0,1,2,0.5,1,0\n";
  const SampleSet s = ParseSamples(text, {});
  EXPECT_EQ(s.dict.size(), 2);
  EXPECT_EQ(s.dict[1], M({2, 0}));
  EXPECT_DOUBLE_EQ(s.eps, 0.25);
}

TEST(LoadSamplesTest, SchemaErrors) {
  const std::string meta = "# dictionary: [[1]]\n# G: [[1]]\n";
  EXPECT_THROW(ParseSamples(meta + "t,x1,xdot1,u1\n0,1,1,0\n", {}),
               std::runtime_error);
  EXPECT_THROW(ParseSamples(meta + "traj,t,x1,xdot1,u1\n0,0,nan,1,0\n", {}),
               std::runtime_error);
  EXPECT_THROW(ParseSamples(meta + "traj,t,x1,xdot1,u1\n0,0,inf,1,0\n", {}),
               std::runtime_error);
  EXPECT_THROW(ParseSamples(meta + "traj,t,x1,xdot1,u1\n0,0,1,1\n", {}),
               std::runtime_error);
  EXPECT_THROW(ParseSamples(meta + "traj,t,x1,xdot1,u1\n0,0,1,abc,0\n", {}),
               std::runtime_error);
  EXPECT_THROW(ParseSamples("# G: [[1]]\ntraj,t,x1,xdot1,u1\n0,0,1,1,0\n", {}),
               std::runtime_error);
}

TEST(LoadSamplesTest, RoundTripIsExact) {
  SampleSet s = SingleSample();
  s.records[0].x(0) = 0.1 + 0.2;
  const SampleSet back = ParseSamples(FormatSamples(s), {});
  EXPECT_EQ(back.records[0].x, s.records[0].x);
  EXPECT_EQ(back.records[0].xdot, s.records[0].xdot);
  EXPECT_EQ(back.G, s.G);
  EXPECT_EQ(back.eps, s.eps);
  EXPECT_EQ(FormatSamples(back), FormatSamples(s));
}

std::vector<SampleRecord> Signal(double h, int count, double (*f)(double),
                                 int traj = 0) {
  std::vector<SampleRecord> out;
  for (int j = 0; j < count; ++j) {
    SampleRecord r;
    r.traj = traj;
    r.t = j * h;
    r.x = Eigen::VectorXd::Constant(1, f(r.t));
    out.push_back(r);
  }
  return out;
}

TEST(FiniteDifferenceTest, LinearSignalExact) {
  const auto recs = FiniteDifferenceDerivatives(
      Signal(0.1, 8, [](double t) { return t; }));
  for (const auto& r : recs) EXPECT_NEAR(r.xdot(0), 1.0, 1e-12);
}

TEST(FiniteDifferenceTest, QuadraticInteriorExact) {
  const auto recs = FiniteDifferenceDerivatives(
      Signal(0.1, 8, [](double t) { return t * t; }));
  for (const auto& r : recs) EXPECT_NEAR(r.xdot(0), 2 * r.t, 1e-12);
}

TEST(FiniteDifferenceTest, ExponentialInteriorError) {
  const auto recs = FiniteDifferenceDerivatives(
      Signal(0.01, 101, [](double t) { return std::exp(t); }));
  double worst = 0.0;
  for (size_t j = 1; j + 1 < recs.size(); ++j) {
    worst = std::max(worst, std::abs(recs[j].xdot(0) - std::exp(recs[j].t)));
  }
  EXPECT_LE(worst, 2e-4);
}

TEST(FiniteDifferenceTest, NeverCrossesTrajectories) {
  auto a = Signal(0.1, 4, [](double t) { return t; }, 0);
  auto b = Signal(0.1, 4, [](double t) { return 100 - 3 * t; }, 1);
  a.insert(a.end(), b.begin(), b.end());
  const auto recs = FiniteDifferenceDerivatives(a);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(recs[j].xdot(0), 1.0, 1e-12);
  for (int j = 4; j < 8; ++j) EXPECT_NEAR(recs[j].xdot(0), -3.0, 1e-12);
}

TEST(FiniteDifferenceTest, Errors) {
  auto recs = Signal(0.1, 4, [](double t) { return t; });
  recs[2].t = recs[1].t;
  EXPECT_THROW(FiniteDifferenceDerivatives(recs), std::invalid_argument);
  EXPECT_THROW(FiniteDifferenceDerivatives(
                   Signal(0.1, 2, [](double t) { return t; })),
               std::invalid_argument);
}

TEST(NoiseBoundTest, Formula) {
  std::vector<SampleRecord> recs(3);
  recs[0].xdot = Eigen::VectorXd::Constant(1, 3);
  recs[1].xdot = Eigen::VectorXd::Constant(1, -15);
  recs[2].xdot = Eigen::VectorXd::Constant(1, 6);
  EXPECT_DOUBLE_EQ(EstimateNoiseBound(recs), 1.0);
  for (auto& r : recs) r.xdot.setZero();
  EXPECT_EQ(EstimateNoiseBound(recs), 0.0);
  EXPECT_THROW(EstimateNoiseBound({}), std::invalid_argument);
}

TEST(ConsistencySetTest, SingleSampleEntries) {
  const ConsistencySet c(SingleSample());
  ASSERT_EQ(c.size(), 4);
  const int p11 = ConsistencySet::Index(2, 0, 0, +1);
  const int m11 = ConsistencySet::Index(2, 0, 0, -1);
  const int p12 = ConsistencySet::Index(2, 0, 1, +1);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  expected.col(0) << 2, 1;
  EXPECT_EQ(c.Phi(p11), expected);
  EXPECT_EQ(c.Phi(m11), -expected);
  EXPECT_NEAR(c.d(p11), 0.6, 1e-15);
  EXPECT_NEAR(c.d(m11), -0.4, 1e-15);
  EXPECT_NEAR(c.d(p12), 1.1, 1e-15);
}

TEST(ConsistencySetTest, FamilySizeAndSignedSymmetry) {
  SampleSet s = SingleSample();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  s.records.clear();
  for (int i = 0; i < 60; ++i) {
    SampleRecord r;
    r.traj = i / 10;
    r.t = i % 10;
    r.x = Eigen::Vector2d(u(rng), u(rng));
    r.xdot = Eigen::Vector2d(u(rng), u(rng));
    r.u = Eigen::Vector2d(u(rng), u(rng));
    s.records.push_back(r);
  }
  const ConsistencySet c(s);
  EXPECT_EQ(c.size(), 240);
  for (int a = 0; a < c.size(); ++a) {
    const Eigen::MatrixXd P = c.Phi(a);
    int nonzero_cols = 0;
    for (int j = 0; j < P.cols(); ++j) nonzero_cols += !P.col(j).isZero();
    EXPECT_EQ(nonzero_cols, 1);
    if (c.sign_of(a) > 0) {
      EXPECT_NEAR(c.d(a) + c.d(a + 1), 2 * s.eps, 1e-14);
    }
  }
  const ConsistencySet again(s);
  EXPECT_EQ(again.ds(), c.ds());
  EXPECT_EQ(again.phi_values(), c.phi_values());
}

TEST(MembershipTest, TruePlantWithBoundedNoise) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  SampleSet s = SingleSample();
  s.records.clear();
  s.eps = 0.05;
  Eigen::MatrixXd F(2, 2);
  F << 0.3, -1, 2, 0.5;
  for (int i = 0; i < 40; ++i) {
    SampleRecord r;
    r.x = Eigen::Vector2d(u(rng), u(rng));
    r.u = Eigen::Vector2d(u(rng), u(rng));
    r.xdot = F * s.dict.Evaluate(r.x) + s.G * r.u +
             s.eps * Eigen::Vector2d(u(rng), u(rng));
    s.records.push_back(r);
  }
  const ConsistencySet c(s);
  const auto res = CheckMembership(c, F);
  EXPECT_TRUE(res.member);
  // Oracle: recompute every trace inequality from the dense Phi matrices.
  double worst = -1e300;
  for (int a = 0; a < c.size(); ++a) {
    worst = std::max(worst, TraceOf(F, c.Phi(a)) - c.d(a));
  }
  EXPECT_NEAR(res.max_violation, worst, 1e-12);
}

TEST(MembershipTest, HugeScalingRejectedAndHugeEpsAccepts) {
  SampleSet s = SingleSample();
  s.eps = 0.0;
  Eigen::MatrixXd F(2, 2);
  F << 0.1, 0.3, 0.2, 0.6;
  s.records[0].xdot = F * s.dict.Evaluate(s.records[0].x);
  const ConsistencySet c(s);
  EXPECT_TRUE(CheckMembership(c, F).member);
  // phi(x) = (2, 1) is nonzero, so scaling F by 1e6 moves F phi off xdot.
  const auto res = CheckMembership(c, 1e6 * F);
  EXPECT_FALSE(res.member);
  EXPECT_GT(res.max_violation, 1e5);
  s.eps = 1e300;
  EXPECT_TRUE(CheckMembership(ConsistencySet(s), 1e6 * F).member);
  EXPECT_THROW(CheckMembership(c, Eigen::MatrixXd::Zero(2, 3)),
               std::invalid_argument);
}

}  // namespace
}  // namespace ddccm
