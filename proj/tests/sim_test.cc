#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ddccm/data/consistency_set.h"
#include "ddccm/sim/examples.h"
#include "ddccm/sim/simulate.h"

namespace ddccm {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

TEST(IntegrateTest, ScalarDecayMatchesExponential) {
  const auto f = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return -x;
  };
  const Trajectory tr = IntegrateField(f, Vec({1.0}), 1.0, {});
  ASSERT_FALSE(tr.diverged);
  ASSERT_EQ(tr.t.size(), 101u);
  EXPECT_NEAR(tr.t.back(), 1.0, 1e-12);
  EXPECT_NEAR(tr.x.back()(0), std::exp(-1.0), 1e-8);
}

// Fixed steps (tolerance disabled): halving h shrinks the global error of
// the classical scheme by about 2^4.
TEST(IntegrateTest, FourthOrderConvergence) {
  const auto f = [](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Vec({x(1), -x(0) + 0.1 * std::sin(t)});
  };
  const Eigen::VectorXd x0 = Vec({1.0, 0.0});
  IntegrateOptions fine;
  fine.h = 1e-3;
  fine.tol = 1e-14;
  const Eigen::VectorXd ref = IntegrateField(f, x0, 2.0, fine).x.back();
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    IntegrateOptions o;
    o.h = h;
    o.tol = 1e30;
    const double err = (IntegrateField(f, x0, 2.0, o).x.back() - ref).norm();
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 12.0);
      EXPECT_LT(prev / err, 20.0);
    }
    prev = err;
  }
}

TEST(IntegrateTest, OpenLoopLinearExampleGrows) {
  const PolynomialPlant plant = LinearExamplePlant();
  IntegrateOptions o;
  o.divergence_norm = 1e3;
  const Trajectory tr = Integrate(plant, nullptr, Vec({0.5, 0.5}), 50.0, o);
  EXPECT_TRUE(tr.diverged);
  EXPECT_LT(tr.t.back(), 50.0);
}

TEST(IntegrateTest, ControllerIsApplied) {
  PolynomialPlant plant;
  plant.F = Eigen::MatrixXd::Zero(1, 1);
  plant.dict = MonomialDictionary({Monomial::Variable(1, 0)});
  plant.G = Eigen::MatrixXd::Ones(1, 1);
  const Controller k = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return -2.0 * x;
  };
  const Trajectory tr = Integrate(plant, k, Vec({1.0}), 1.0);
  EXPECT_NEAR(tr.x.back()(0), std::exp(-2.0), 1e-8);
  EXPECT_NEAR(tr.u.back()(0), -2.0 * std::exp(-2.0), 1e-8);
}

TEST(IntegrateTest, RejectsBadArguments) {
  const auto f = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x;
  };
  IntegrateOptions o;
  o.h = 0.0;
  EXPECT_THROW(IntegrateField(f, Vec({1.0}), 1.0, o), std::invalid_argument);
  EXPECT_THROW(IntegrateField(f, Vec({1.0}), -1.0, {}), std::invalid_argument);
}

TEST(DatasetTest, DeterministicForSeed) {
  const PolynomialPlant plant = Nonlinear2dExamplePlant();
  DatasetOptions o;
  const SampleSet a = GenerateDataset(plant, o);
  const SampleSet b = GenerateDataset(plant, o);
  EXPECT_EQ(FormatSamples(a), FormatSamples(b));
  o.seed = 2;
  EXPECT_NE(FormatSamples(a), FormatSamples(GenerateDataset(plant, o)));
}

TEST(DatasetTest, ShapeNoiseBoundAndMembership) {
  for (const std::string& name : ExampleNames()) {
    const PolynomialPlant plant = ExamplePlant(name);
    const SampleSet s = GenerateDataset(plant, {});
    ASSERT_EQ(s.num_samples(), 60) << name;
    double max_xdot = 0.0, max_noise = 0.0;
    for (const auto& r : s.records) {
      const Eigen::VectorXd clean = plant.Drift(r.x);
      max_xdot = std::max(max_xdot, clean.cwiseAbs().maxCoeff());
      max_noise = std::max(max_noise, (r.xdot - clean).cwiseAbs().maxCoeff());
      EXPECT_LE(r.x.cwiseAbs().maxCoeff(), 10.0);
    }
    EXPECT_GT(s.eps, 0.0);
    EXPECT_LE(max_noise, s.eps + 1e-15) << name;
    EXPECT_GT(max_noise, 0.2 * s.eps) << name;
    EXPECT_TRUE(CheckMembership(ConsistencySet(s), plant.F).member) << name;
  }
}

TEST(DatasetTest, NoiselessDataHasZeroNoise) {
  const PolynomialPlant plant = LinearExamplePlant();
  DatasetOptions o;
  o.noise = false;
  const SampleSet s = GenerateDataset(plant, o);
  for (const auto& r : s.records) {
    EXPECT_LT((r.xdot - plant.Drift(r.x)).norm(), 1e-14);
  }
}

TEST(DatasetTest, TrajectoryCsvHasHeader) {
  const auto f = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return -x;
  };
  IntegrateOptions o;
  o.h = 0.5;
  std::ostringstream os;
  WriteTrajectoryCsv(IntegrateField(f, Vec({1.0, 2.0}), 1.0, o), os);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 7), "t,x1,x2");
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 3);
}

}  // namespace
}  // namespace ddccm
