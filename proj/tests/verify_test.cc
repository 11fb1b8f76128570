#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddccm/dualprog/synthesis.h"
#include "ddccm/sim/examples.h"
#include "ddccm/verify/verify.h"

namespace ddccm {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

SampleSet Samples(const Eigen::MatrixXd& F, const MonomialDictionary& dict,
                  const Eigen::MatrixXd& G, int T, double eps, double noise,
                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = static_cast<int>(F.rows());
  SampleSet s;
  s.G = G;
  s.eps = eps;
  s.dict = dict;
  for (int i = 0; i < T; ++i) {
    SampleRecord r;
    r.t = i;
    r.x.resize(n);
    for (int j = 0; j < n; ++j) r.x(j) = u(rng);
    r.u = Eigen::VectorXd::Zero(G.cols());
    r.xdot = F * dict.Evaluate(r.x);
    for (int j = 0; j < n; ++j) r.xdot(j) += noise * u(rng);
    s.records.push_back(r);
  }
  return s;
}

Certificate ConstantCertificate(const Eigen::MatrixXd& W, double rho,
                                const Eigen::MatrixXd& G,
                                const MonomialDictionary& dict, double lambda) {
  Certificate c;
  c.n = static_cast<int>(W.rows());
  c.W = PolyMatrix::Constant(W, c.n, true);
  c.rho = Polynomial(c.n, rho);
  c.G = G;
  c.dict = dict;
  c.lambda = lambda;
  return c;
}

Eigen::MatrixXd PublishedLinearW() {
  Eigen::MatrixXd W(2, 2);
  W << 0.1019, 0.0154, 0.0154, 0.0028;
  return W;
}

TEST(SamplerTest, CountZeroGivesNoPlants) {
  const PolynomialPlant p = LinearExamplePlant();
  const ConsistencySet set(Samples(p.F, p.dict, p.G, 10, 0.1, 0.05, 1));
  EXPECT_TRUE(SampleConsistentPlants(set, 0, 1).plants.empty());
}

TEST(SamplerTest, HugeNoiseBoundAcceptsSample) {
  const PolynomialPlant p = LinearExamplePlant();
  const ConsistencySet set(Samples(p.F, p.dict, p.G, 3, 1e3, 0.05, 2));
  SamplerOptions o;
  o.include_vertices = false;
  const PlantSamples s = SampleConsistentPlants(set, 1, 7, o);
  ASSERT_EQ(s.plants.size(), 1u);
  EXPECT_TRUE(CheckMembership(set, s.plants[0]).member);
  EXPECT_GT(s.center_slack, 0.0);
}

TEST(SamplerTest, SamplesAreMembersAndDeterministic) {
  const PolynomialPlant p = Nonlinear2dExamplePlant();
  const ConsistencySet set(Samples(p.F, p.dict, p.G, 30, 0.1, 0.1, 3));
  const PlantSamples a = SampleConsistentPlants(set, 20, 11);
  const PlantSamples b = SampleConsistentPlants(set, 20, 11);
  EXPECT_EQ(a.walk_samples, 20);
  EXPECT_EQ(a.vertex_samples, 2 * 2 * 4);
  ASSERT_EQ(a.plants.size(), b.plants.size());
  double spread = 0.0;
  for (size_t i = 0; i < a.plants.size(); ++i) {
    EXPECT_TRUE(CheckMembership(set, a.plants[i]).member) << i;
    EXPECT_EQ(a.plants[i], b.plants[i]);
    spread = std::max(spread, (a.plants[i] - a.center).norm());
  }
  EXPECT_GT(spread, 1e-3);
}

// With tiny noise and many samples the set collapses around the true plant;
// the sampled diameter bounds the distance to it.
TEST(SamplerTest, NearNoiselessDataConcentratesOnTruePlant) {
  const PolynomialPlant p = Nonlinear2dExamplePlant();
  const ConsistencySet set(Samples(p.F, p.dict, p.G, 60, 1e-9, 1e-9, 4));
  const PlantSamples s = SampleConsistentPlants(set, 20, 5);
  ASSERT_FALSE(s.plants.empty());
  for (const auto& F : s.plants) EXPECT_LT((F - p.F).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SamplerTest, InconsistentDataIsReported) {
  const PolynomialPlant p = LinearExamplePlant();
  const ConsistencySet set(Samples(p.F, p.dict, p.G, 20, 1e-6, 0.5, 6));
  EXPECT_THROW(SampleConsistentPlants(set, 5, 1), EmptyConsistencySet);
}

TEST(GridTest, BoxGrid) {
  const auto g = BoxGrid(3, 1.5, 5);
  EXPECT_EQ(g.size(), 125u);
  EXPECT_EQ(g.front(), Vec({-1.5, -1.5, -1.5}));
  EXPECT_EQ(g.back(), Vec({1.5, 1.5, 1.5}));
  EXPECT_THROW(BoxGrid(0, 1.0, 3), std::invalid_argument);
}

TEST(ContractionTest, PublishedLinearCertificateIsNegativeDefinite) {
  const PolynomialPlant p = LinearExamplePlant();
  const Certificate c = ConstantCertificate(PublishedLinearW(), 9.9686, p.G, p.dict, 0.01);
  const ContractionReport r = CheckContraction(c, p.F, {Vec({0, 0}), Vec({1, -1})});
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_eig, -1e-3);
  EXPECT_TRUE(r.forms_agree);
  EXPECT_LT(r.max_eig_metric_form, 0.0);
}

TEST(ContractionTest, OpenLoopUnstablePlantFails) {
  const PolynomialPlant p = LinearExamplePlant();
  const Certificate c = ConstantCertificate(PublishedLinearW(), 0.0, p.G, p.dict, 0.01);
  const ContractionReport r = CheckContraction(c, p.F, {Vec({0, 0})});
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_eig, 0.0);
  EXPECT_TRUE(r.forms_agree);
}

TEST(ContractionTest, StableScalarDecay) {
  const MonomialDictionary dict({Monomial({1, 0}), Monomial({0, 1})});
  const Certificate c = ConstantCertificate(Eigen::MatrixXd::Identity(2, 2), 0.0,
                                            Eigen::MatrixXd::Zero(2, 0), dict, 0.0);
  const ContractionReport r = CheckContraction(
      c, -Eigen::MatrixXd::Identity(2, 2), BoxGrid(2, 2.0, 3));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.max_eig, -2.0, 1e-12);
  EXPECT_THROW(CheckContraction(c, -Eigen::MatrixXd::Identity(2, 2), {}),
               std::invalid_argument);
}

TEST(DistanceTest, ClosedForms) {
  const MonomialDictionary dict({Monomial({1, 0}), Monomial({0, 1})});
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const Certificate id = ConstantCertificate(I, 1.0, I, dict, 0.1);
  EXPECT_EQ(RiemannDistance(id, Vec({0, 0})), 0.0);
  EXPECT_NEAR(RiemannDistance(id, Vec({3, 4})), 5.0, 1e-12);
  const Certificate c = ConstantCertificate(PublishedLinearW(), 1.0, I, dict, 0.1);
  const Eigen::VectorXd x = Vec({0.3, -0.7});
  EXPECT_NEAR(RiemannDistance(c, x), std::sqrt(x.dot(PublishedLinearW().inverse() * x)),
              1e-8);
}

class SynthesizedLinear : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    plant_ = new PolynomialPlant(LinearExamplePlant());
    set_ = new ConsistencySet(GenerateDataset(*plant_, {}));
    SynthesisOptions o;
    o.program.deg_w = 0;
    const SynthesisResult r = BisectLambda(*set_, o);
    ASSERT_TRUE(r.certificate.has_value()) << r.extraction_error;
    cert_ = new Certificate(*r.certificate);
  }
  static void TearDownTestSuite() {
    delete cert_;
    delete set_;
    delete plant_;
  }
  static PolynomialPlant* plant_;
  static ConsistencySet* set_;
  static Certificate* cert_;
};
PolynomialPlant* SynthesizedLinear::plant_ = nullptr;
ConsistencySet* SynthesizedLinear::set_ = nullptr;
Certificate* SynthesizedLinear::cert_ = nullptr;

TEST_F(SynthesizedLinear, EndToEndVerificationPasses) {
  VerifyOptions o;
  o.F_true = plant_->F;
  const VerificationReport r = Verify(*cert_, *set_, o);
  EXPECT_TRUE(r.pass) << ReportToText(r);
  EXPECT_EQ(r.grid_points, 49);
  EXPECT_EQ(r.walk_samples, 200);
  EXPECT_TRUE(r.true_plant_pass);
  EXPECT_EQ(ReportToJson(r), ReportToJson(Verify(*cert_, *set_, o)));
}

TEST_F(SynthesizedLinear, DualConditionsHold) {
  const DualConditionReport r = CheckDualConditions(*cert_, *set_, 3);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.points, 500);
  EXPECT_GT(r.min_positivity, 0.0);
}

TEST_F(SynthesizedLinear, NegatedMultipliersFail) {
  Certificate c = *cert_;
  for (auto& g : c.multipliers) g.Q = -g.Q;
  const DualConditionReport r = CheckDualConditions(c, *set_, 3);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(!r.mu_pass || !r.positivity_pass);
}

TEST_F(SynthesizedLinear, ZeroMetricFails) {
  Certificate c = *cert_;
  c.W = PolyMatrix(2, 2, 2, true);
  const DualConditionReport r = CheckDualConditions(c, *set_, 3);
  EXPECT_FALSE(r.metric_pass);
  EXPECT_FALSE(r.pass);
}

TEST(MetricDerivativeTest, MatchesTrajectoryFiniteDifferences) {
  // W depends on x1 only and G = e2, so G-orthogonality holds.
  Certificate c;
  c.n = 2;
  c.dict = MonomialDictionary({Monomial({1, 0}), Monomial({0, 1}), Monomial({2, 0})});
  c.W = PolyMatrix(2, 2, 2, true);
  Polynomial w00(2, 1.0);
  w00.AddTerm(Monomial({2, 0}), 0.5);
  Polynomial w01(2);
  w01.AddTerm(Monomial({1, 0}), 0.2);
  c.W.Set(0, 0, w00);
  c.W.Set(0, 1, w01);
  c.W.Set(1, 1, Polynomial(2, 1.0));
  c.G = Eigen::MatrixXd::Zero(2, 1);
  c.G(1, 0) = 1.0;
  c.rho = Polynomial(2, 1.0);
  PolynomialPlant plant;
  plant.dict = c.dict;
  plant.F.resize(2, 3);
  plant.F << -1.0, 0.5, 0.3, 0.0, -1.0, 1.0;
  plant.G = c.G;
  const Controller k = [](double, const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, -x(1));
  };
  IntegrateOptions o;
  o.h = 1e-3;
  const Trajectory tr = Integrate(plant, k, Vec({1.0, -0.5}), 2.0, o);
  EXPECT_LT(MetricDerivativeFdError(c, plant.F, tr), 1e-4);
}

}  // namespace
}  // namespace ddccm
