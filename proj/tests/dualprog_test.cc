#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddccm/dualprog/certificate.h"
#include "ddccm/dualprog/dual_program.h"
#include "ddccm/dualprog/synthesis.h"

namespace ddccm {
namespace {

Monomial M(std::vector<int> e) { return Monomial(std::move(e)); }

MonomialDictionary LinearDict(int n) {
  std::vector<Monomial> m;
  for (int i = 0; i < n; ++i) m.push_back(Monomial::Variable(n, i, 1));
  return MonomialDictionary(m);
}

// T samples of xdot = F phi(x) + G u + noise, noise uniform in [-eps/2, eps/2].
ConsistencySet MakeSet(const Eigen::MatrixXd& F, const MonomialDictionary& dict,
                       const Eigen::MatrixXd& G, int T, double eps,
                       std::mt19937_64* rng, double box = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = static_cast<int>(F.rows());
  SampleSet s;
  s.G = G;
  s.eps = eps;
  s.dict = dict;
  for (int i = 0; i < T; ++i) {
    SampleRecord r;
    r.traj = 0;
    r.t = i;
    r.x.resize(n);
    for (int j = 0; j < n; ++j) r.x(j) = box * u(*rng);
    r.u.resize(G.cols());
    for (int j = 0; j < G.cols(); ++j) r.u(j) = u(*rng);
    r.xdot = F * dict.Evaluate(r.x) + G * r.u;
    for (int j = 0; j < n; ++j) r.xdot(j) += 0.5 * eps * u(*rng);
    s.records.push_back(r);
  }
  return ConsistencySet(s);
}

Eigen::VectorXd UnitVector(int n, std::mt19937_64* rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = g(*rng);
  return y.normalized();
}

// y'(W dphi' F' + F dphi W - Wdot + 2 lambda W - rho G G')y with
// Wdot = sum_j dW/dx_j (F phi)_j.
double PrimalValue(const Certificate& c, const Eigen::MatrixXd& F,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = c.n;
  const Eigen::MatrixXd A = F * Jacobian(c.dict).Evaluate(x);
  const Eigen::MatrixXd W = c.W.Evaluate(x);
  const Eigen::VectorXd f = F * c.dict.Evaluate(x);
  Eigen::MatrixXd Wdot = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) Wdot += c.W.Differentiate(j).Evaluate(x) * f(j);
  Eigen::MatrixXd S = W * A.transpose() + A * W - Wdot + 2 * c.lambda * W;
  if (c.G.cols() > 0) S -= c.rho.Evaluate(x) * c.G * c.G.transpose();
  return y.dot(S * y);
}

SynthesisOptions Options(double lambda, int deg_w = 0) {
  SynthesisOptions o;
  o.program.deg_w = deg_w;
  o.lambda_lo = o.lambda_hi = lambda;
  return o;
}

TEST(DualProgramTest, LinearSystemSizes) {
  std::mt19937_64 rng(1);
  const int n = 2, T = 5;
  const ConsistencySet set = MakeSet(-Eigen::MatrixXd::Identity(n, n),
                                     LinearDict(n), Eigen::MatrixXd::Identity(n, n),
                                     T, 0.01, &rng);
  DualProgramOptions o;
  const DualProgram dp = Assemble(set, o);
  EXPECT_EQ(dp.sizes.w_gram_nominal, n);
  EXPECT_EQ(dp.sizes.w_gram_effective, n);
  EXPECT_EQ(dp.sizes.num_multipliers, 2 * n * T);
  EXPECT_EQ(dp.deg_mu_x, 0);
  EXPECT_EQ(dp.sizes.rows_orthogonal, 0);
  // W, every multiplier and the positivity Gram.
  EXPECT_EQ(dp.sizes.num_blocks, 1 + 2 * n * T + 1);
  EXPECT_EQ(dp.w_gram.size(), n);
}

TEST(DualProgramTest, QuadraticMetricGramSize) {
  std::mt19937_64 rng(2);
  const int n = 2;
  const ConsistencySet set =
      MakeSet(-Eigen::MatrixXd::Identity(n, n), LinearDict(n),
              Eigen::MatrixXd::Zero(n, 0), 4, 0.01, &rng);
  DualProgramOptions o;
  o.deg_w = 2;
  const DualProgram dp = Assemble(set, o);
  EXPECT_EQ(dp.sizes.w_gram_nominal, 6);
  EXPECT_EQ(dp.sizes.w_gram_effective, 6);
  EXPECT_TRUE(dp.rho_basis.empty());
}

TEST(DualProgramTest, FacialReductionDropsActuatedVariables) {
  std::mt19937_64 rng(3);
  const int n = 3;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, 1);
  G(2, 0) = 1.0;
  const ConsistencySet set = MakeSet(-Eigen::MatrixXd::Identity(n, n),
                                     LinearDict(n), G, 4, 0.01, &rng);
  DualProgramOptions o;
  o.deg_w = 2;
  const DualProgram reduced = Assemble(set, o);
  EXPECT_EQ(reduced.sizes.w_gram_nominal, 12);
  EXPECT_EQ(reduced.sizes.w_gram_effective, 9);
  EXPECT_EQ(reduced.sizes.rows_orthogonal, 0);
  o.facial_reduction = false;
  const DualProgram full = Assemble(set, o);
  EXPECT_EQ(full.sizes.w_gram_effective, 12);
  EXPECT_GT(full.sizes.rows_orthogonal, 0);
  EXPECT_EQ(AlignedActuatedVariables(G), std::vector<int>{2});
}

TEST(DualProgramTest, DegreeRule) {
  EXPECT_EQ(MinimumMultiplierDegree(3, 0), 2);
  EXPECT_EQ(MinimumMultiplierDegree(1, 0), 0);
  EXPECT_EQ(MinimumMultiplierDegree(2, 1), 3);
  std::mt19937_64 rng(4);
  const MonomialDictionary dict({M({1, 0}), M({0, 1}), M({3, 0})});
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2, 3);
  F(0, 0) = F(1, 1) = -1;
  const ConsistencySet set =
      MakeSet(F, dict, Eigen::MatrixXd::Identity(2, 2), 4, 0.01, &rng);
  DualProgramOptions o;
  EXPECT_EQ(Assemble(set, o).deg_mu_x, 2);
  o.deg_mu_x = 1;
  EXPECT_THROW(Assemble(set, o), std::invalid_argument);
  o.deg_mu_x = -1;
  o.deg_w = 1;
  EXPECT_THROW(Assemble(set, o), std::invalid_argument);
  EXPECT_THROW(Assemble(ConsistencySet(), DualProgramOptions{}),
               std::invalid_argument);
}

// xdot = -x contracts at rate exactly 1.
class ScalarDecayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(5);
    set_ = MakeSet(-Eigen::MatrixXd::Ones(1, 1), LinearDict(1),
                   Eigen::MatrixXd::Zero(1, 0), 6, 1e-3, &rng);
  }
  ConsistencySet set_;
};

TEST_F(ScalarDecayTest, FeasibleBelowTrueRateInfeasibleAbove) {
  const LambdaProbe ok = ProbeLambda(set_, 0.9, Options(0.9));
  EXPECT_EQ(ok.outcome, ProbeOutcome::kFeasible) << ok.message;
  const LambdaProbe bad = ProbeLambda(set_, 1.5, Options(1.5));
  EXPECT_EQ(bad.outcome, ProbeOutcome::kInfeasibleCertified) << bad.message;
  EXPECT_LT(bad.dual_bound, 1e-6);
}

TEST_F(ScalarDecayTest, BisectionBracketsTrueRate) {
  SynthesisOptions o = Options(0.1);
  o.lambda_hi = 2.0;
  const SynthesisResult r = BisectLambda(set_, o);
  ASSERT_EQ(r.outcome, ProbeOutcome::kFeasible);
  ASSERT_TRUE(r.certificate.has_value()) << r.extraction_error;
  EXPECT_GT(r.certificate->lambda, 0.85);
  EXPECT_LT(r.certificate->lambda, 1.0);
  EXPECT_LE(r.probes.size(), 2u + 8u);
}

TEST_F(ScalarDecayTest, SingleSolveWhenRangeIsPoint) {
  const SynthesisResult r = BisectLambda(set_, Options(0.5));
  EXPECT_EQ(r.probes.size(), 1u);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_EQ(r.certificate->lambda, 0.5);
}

TEST_F(ScalarDecayTest, InfeasibleRangeReportsNoCertificate) {
  const SynthesisResult r = BisectLambda(set_, Options(1.5));
  EXPECT_EQ(r.outcome, ProbeOutcome::kInfeasibleCertified);
  EXPECT_FALSE(r.certificate.has_value());
}

TEST(ExtractTest, IdentityMetricFixture) {
  std::mt19937_64 rng(6);
  const int n = 2;
  const ConsistencySet set =
      MakeSet(-Eigen::MatrixXd::Identity(n, n), LinearDict(n),
              Eigen::MatrixXd::Zero(n, 0), 6, 1e-3, &rng);
  DualProgramOptions o;
  o.lambda = 0.5;
  const DualProgram dp = Assemble(set, o);
  // W = 0.5 I + t I with t = 0.5 and all multipliers zero: the zero
  // constraint is violated until extraction repairs it.
  ConicSolution sol;
  sol.status = SolveStatus::kFeasible;
  for (int b = 0; b < dp.program.num_blocks(); ++b) {
    sol.X.push_back(Eigen::MatrixXd::Zero(dp.program.block_dim(b),
                                          dp.program.block_dim(b)));
  }
  sol.X[dp.w_gram.block] = 0.5 * Eigen::MatrixXd::Identity(n, n);
  sol.w = Eigen::VectorXd::Zero(dp.program.num_free());
  sol.w(dp.t_var) = 0.5;
  const Certificate c = ExtractCertificate(dp, set, sol);
  EXPECT_LT((c.W.Evaluate(Eigen::Vector2d(0.3, -0.7)) -
             Eigen::MatrixXd::Identity(n, n))
                .cwiseAbs()
                .maxCoeff(),
            1e-5);
  EXPECT_GT(c.before.zero_residual, 0.1);
  EXPECT_LE(c.after.zero_residual, 1e-9);
  EXPECT_GE(c.after.multiplier_min_eig, -1e-12);
  EXPECT_GT(c.after.positivity_min_eig, 0.0);
}

TEST(ExtractTest, SmallCoefficientIsPruned) {
  std::mt19937_64 rng(7);
  const ConsistencySet set = MakeSet(-Eigen::MatrixXd::Ones(1, 1), LinearDict(1),
                                     Eigen::MatrixXd::Zero(1, 0), 6, 1e-3, &rng);
  SynthesisOptions o = Options(0.5, 2);
  DualProgram dp;
  ConicSolution sol;
  const LambdaProbe p = ProbeLambda(set, 0.5, o, &dp, &sol);
  ASSERT_EQ(p.outcome, ProbeOutcome::kFeasible);
  DualProgramOptions po = o.program;
  po.lambda = 0.5;
  po.fixed_t = 0.5 * p.optimal_t;
  dp = Assemble(set, po);
  sol = Solve(dp.program);
  ASSERT_EQ(sol.status, SolveStatus::kFeasible);
  const Certificate clean = ExtractCertificate(dp, set, sol);
  EXPECT_LE(clean.after.zero_residual, 1e-6);

  // Set the x coefficient of W to 3e-6 relative to its largest coefficient
  // through the (1, x) Gram entry.
  const double scale = [&] {
    PolyMatrix W = Reconstruct(dp.w_gram, sol.X[dp.w_gram.block]);
    return W.MaxAbsCoefficient() + sol.w(dp.t_var);
  }();
  ConicSolution perturbed = sol;
  const Monomial x = M({1});
  const double before = Reconstruct(dp.w_gram, sol.X[dp.w_gram.block])(0, 0)
                            .coefficient(x);
  const double bump = 3e-6 * scale - before;
  perturbed.X[dp.w_gram.block](0, 1) += 0.5 * bump;
  perturbed.X[dp.w_gram.block](1, 0) += 0.5 * bump;
  const Certificate c = ExtractCertificate(dp, set, perturbed);
  EXPECT_TRUE(c.pruning_applied);
  EXPECT_GE(c.pruned_coefficients, 1);
  EXPECT_EQ(c.W(0, 0).coefficient(x), 0.0);
  EXPECT_LE(c.after.zero_residual, 1e-6);
}

TEST(CertificateTest, SoundnessAndMultiplierNonnegativity) {
  std::mt19937_64 rng(8);
  // xdot = A x + G u with A unstable; data from the true plant.
  Eigen::Matrix2d A;
  A << 0.4285, -0.4298, 0.4018, 1.3036;
  Eigen::Matrix2d G;
  G << -0.7826, 0.7731, -0.5110, 0.0339;
  const ConsistencySet set = MakeSet(A, LinearDict(2), G, 20, 0.05, &rng);
  const SynthesisResult r = BisectLambda(set, Options(0.1));
  ASSERT_TRUE(r.certificate.has_value()) << r.extraction_error;
  const Certificate& c = *r.certificate;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::MatrixXd> plants = {A};
  while (plants.size() < 20) {
    Eigen::MatrixXd F = A;
    for (int i = 0; i < F.size(); ++i) F(i) += 0.02 * u(rng);
    if (CheckMembership(set, F).member) plants.push_back(F);
  }
  for (const auto& F : plants) {
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd x(2);
      x << 3 * u(rng), 3 * u(rng);
      EXPECT_LT(PrimalValue(c, F, x, UnitVector(2, &rng)), 0.0);
    }
  }
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd x(2);
    x << 3 * u(rng), 3 * u(rng);
    const Eigen::VectorXd y = UnitVector(2, &rng);
    for (int a = 0; a < set.size(); a += 7) EXPECT_GE(c.Mu(a, x, y), -1e-9);
  }
}

TEST(CertificateTest, OrthogonalityHoldsStructurally) {
  std::mt19937_64 rng(9);
  const int n = 2;
  Eigen::MatrixXd G(n, 1);
  G << 1.0, 1.0;
  const ConsistencySet set = MakeSet(-Eigen::MatrixXd::Identity(n, n),
                                     LinearDict(n), G, 8, 0.01, &rng);
  const SynthesisResult r = BisectLambda(set, Options(0.3, 2));
  ASSERT_TRUE(r.certificate.has_value()) << r.extraction_error;
  const Certificate& c = *r.certificate;
  PolyMatrix e = c.W.Differentiate(0) * G(0, 0) + c.W.Differentiate(1) * G(1, 0);
  EXPECT_LE(e.MaxAbsCoefficient(), 1e-8);
  EXPECT_LE(c.after.zero_residual, 1e-6);
}

TEST(CertificateTest, JsonRoundTrip) {
  std::mt19937_64 rng(10);
  const ConsistencySet set = MakeSet(-Eigen::MatrixXd::Identity(2, 2), LinearDict(2),
                                     Eigen::MatrixXd::Identity(2, 2), 4, 0.01, &rng);
  const SynthesisResult r = BisectLambda(set, Options(0.2));
  ASSERT_TRUE(r.certificate.has_value());
  const std::string text = CertificateToJson(*r.certificate);
  const Certificate back = CertificateFromJson(text);
  EXPECT_EQ(CertificateToJson(back), text);
  EXPECT_EQ(back.multipliers.size(), r.certificate->multipliers.size());
  EXPECT_THROW(CertificateFromJson("{"), std::runtime_error);
  EXPECT_THROW(CertificateFromJson("{\"format\": \"other\"}"), std::runtime_error);
}

// n = 1, L = 1, T = 2: the primal maximum over the interval of consistent F
// is attained at an end point and must be negative wherever the dual
// certificate exists.
TEST(CertificateTest, TinyInstancesAgreeWithBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int certified = 0;
  for (int inst = 0; inst < 12; ++inst) {
    const int p = 1 + inst % 3;
    const MonomialDictionary dict({M({p})});
    const bool actuated = inst % 2 == 0;
    const Eigen::MatrixXd G = actuated ? Eigen::MatrixXd::Constant(1, 1, 0.5 + std::abs(u(rng)))
                                       : Eigen::MatrixXd::Zero(1, 0);
    const double f = actuated ? 2.0 * u(rng) : -0.5 - std::abs(u(rng));
    const ConsistencySet set = MakeSet(Eigen::MatrixXd::Constant(1, 1, f), dict,
                                       G, 2, 0.05, &rng);
    const int deg_w = (!actuated && inst % 4 == 1) ? 2 : 0;
    const SynthesisResult r = BisectLambda(set, Options(0.05, deg_w));
    if (!r.certificate) continue;
    ++certified;
    // Interval of consistent F.
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < 2; ++i) {
      const double ph = set.phi_values()(0, i);
      const double r0 = set.residuals()(0, i);
      const double a = (r0 - set.eps()) / ph, b = (r0 + set.eps()) / ph;
      lo = std::max(lo, std::min(a, b));
      hi = std::min(hi, std::max(a, b));
    }
    ASSERT_LE(lo, hi);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd x(1);
      x << 2 * u(rng);
      Eigen::VectorXd y(1);
      y << (u(rng) < 0 ? -1.0 : 1.0);
      const double best =
          std::max(PrimalValue(*r.certificate, Eigen::MatrixXd::Constant(1, 1, lo), x, y),
                   PrimalValue(*r.certificate, Eigen::MatrixXd::Constant(1, 1, hi), x, y));
      EXPECT_LT(best, 0.0) << "instance " << inst;
    }
  }
  EXPECT_GT(certified, 0);
}

// xdot = -x + x^3 contracts with a constant metric exactly where
// 3 x^2 < 1 - lambda, so it is certifiable on |x| <= 0.4 but not globally.
TEST(RegionTest, BoxLocalizesPositivity) {
  std::mt19937_64 rng(21);
  const MonomialDictionary dict({M({1}), M({3})});
  Eigen::MatrixXd F(1, 2);
  F << -1.0, 1.0;
  const ConsistencySet set =
      MakeSet(F, dict, Eigen::MatrixXd::Zero(1, 0), 8, 1e-3, &rng);
  SynthesisOptions o = Options(0.1);
  EXPECT_EQ(ProbeLambda(set, 0.1, o).outcome, ProbeOutcome::kInfeasibleCertified);
  o.program.region_radius = 0.4;
  const SynthesisResult r = BisectLambda(set, o);
  ASSERT_EQ(r.outcome, ProbeOutcome::kFeasible);
  ASSERT_TRUE(r.certificate.has_value());
  const Certificate& c = *r.certificate;
  EXPECT_EQ(c.region_multipliers.size(), 1u);
  EXPECT_DOUBLE_EQ(c.region_radius, 0.4);
  EXPECT_LT(c.after.positivity_identity, 1e-8);
  for (double x = -0.4; x <= 0.4; x += 0.01) {
    Eigen::VectorXd xv(1), y(1);
    xv << x;
    y << 1.0;
    EXPECT_LT(PrimalValue(c, F, xv, y), 0.0) << x;
    EXPECT_TRUE(InRegion(c, xv));
  }
  Eigen::VectorXd far(1);
  far << 0.5;
  EXPECT_FALSE(InRegion(c, far));
  o.program.region_radius = 1.0;
  EXPECT_EQ(ProbeLambda(set, 0.1, o).outcome, ProbeOutcome::kInfeasibleCertified);
  const Certificate back = CertificateFromJson(CertificateToJson(c));
  EXPECT_DOUBLE_EQ(back.region_radius, 0.4);
  EXPECT_EQ(back.region_multipliers.size(), 1u);
}

}  // namespace
}  // namespace ddccm
