#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddccm/polyalg/kronecker.h"
#include "ddccm/polyalg/poly_matrix.h"
#include "ddccm/polyalg/polynomial.h"

namespace ddccm {
namespace {

Monomial M(std::vector<int> e) { return Monomial(std::move(e)); }

Polynomial RandomPolynomial(int num_vars, int degree, std::mt19937_64* rng) {
  std::normal_distribution<double> normal;
  Polynomial p(num_vars);
  for (const auto& m : MonomialsUpToDegree(num_vars, degree)) {
    p.AddTerm(m, normal(*rng));
  }
  return p;
}

// Sums c * prod x_i^e_i with std::pow, independent of Monomial::Evaluate.
double NaiveEvaluate(const Polynomial& p, const Eigen::VectorXd& x) {
  double v = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double t = c;
    for (int i = 0; i < m.num_vars(); ++i) t *= std::pow(x(i), m.exponent(i));
    v += t;
  }
  return v;
}

TEST(MonomialTest, GradedLexOrder) {
  const auto mons = MonomialsUpToDegree(2, 2);
  ASSERT_EQ(mons.size(), 6u);
  EXPECT_EQ(mons[0], M({0, 0}));
  EXPECT_EQ(mons[1], M({1, 0}));
  EXPECT_EQ(mons[2], M({0, 1}));
  EXPECT_EQ(mons[3], M({2, 0}));
  EXPECT_EQ(mons[4], M({1, 1}));
  EXPECT_EQ(mons[5], M({0, 2}));
  EXPECT_EQ(MonomialsUpToDegree(3, 2).size(), 10u);
  EXPECT_EQ(MonomialsUpToDegree(3, 2, {0, 1}).size(), 6u);
}

TEST(MonomialTest, NegativeExponentRejected) {
  EXPECT_THROW(M({1, -1}), std::invalid_argument);
}

TEST(JacobianTest, TwoEntryDictionary) {
  // phi = [x2, x1^2]
  const MonomialDictionary dict({M({0, 1}), M({2, 0})});
  const PolyMatrix J = Jacobian(dict);
  ASSERT_EQ(J.rows(), 2);
  ASSERT_EQ(J.cols(), 2);
  EXPECT_TRUE(J(0, 0).IsZero());
  EXPECT_EQ(J(0, 1), Polynomial(2, 1.0));
  EXPECT_EQ(J(1, 0), Polynomial(M({1, 0}), 2.0));
  EXPECT_TRUE(J(1, 1).IsZero());
}

TEST(JacobianTest, ConstantDictionaryHasZeroJacobian) {
  const MonomialDictionary dict({Monomial::Constant(3)});
  const PolyMatrix J = Jacobian(dict);
  ASSERT_EQ(J.rows(), 1);
  ASSERT_EQ(J.cols(), 3);
  for (int j = 0; j < 3; ++j) EXPECT_TRUE(J(0, j).IsZero());
}

TEST(JacobianTest, MatchesCentralDifferences) {
  const MonomialDictionary dict(MonomialsUpToDegree(2, 3));
  const PolyMatrix J = Jacobian(dict);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Vector2d x(u(rng), u(rng));
    const Eigen::MatrixXd Jx = J.Evaluate(x);
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const Eigen::VectorXd fd =
          (dict.Evaluate(xp) - dict.Evaluate(xm)) / (2 * h);
      for (int k = 0; k < dict.size(); ++k) {
        EXPECT_NEAR(Jx(k, j), fd(k), 1e-6) << "entry " << k << "," << j;
      }
    }
  }
}

TEST(JacobianTest, ChainRuleAlongPath) {
  // d/dt phi(x(t)) = (dphi/dx) xdot along x(t) = (sin t, t^2 - 1).
  const MonomialDictionary dict(MonomialsUpToDegree(2, 3));
  const PolyMatrix J = Jacobian(dict);
  auto path = [](double t) { return Eigen::Vector2d(std::sin(t), t * t - 1); };
  auto pathdot = [](double t) { return Eigen::Vector2d(std::cos(t), 2 * t); };
  const double h = 1e-5;
  for (double t : {-1.0, -0.3, 0.2, 0.9, 1.4}) {
    const Eigen::VectorXd fd =
        (dict.Evaluate(path(t + h)) - dict.Evaluate(path(t - h))) / (2 * h);
    const Eigen::VectorXd chain = J.Evaluate(path(t)) * pathdot(t);
    EXPECT_LT((fd - chain).lpNorm<Eigen::Infinity>(), 1e-5);
  }
}

TEST(MonomialDictionaryTest, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(MonomialDictionary(std::vector<Monomial>{}), std::invalid_argument);
  EXPECT_THROW(MonomialDictionary({M({1, 0}), M({1, 0})}),
               std::invalid_argument);
}

TEST(PolynomialTest, RingAxiomsAtRandomPoints) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    const Polynomial p = RandomPolynomial(3, 3, &rng);
    const Polynomial q = RandomPolynomial(3, 2, &rng);
    const Polynomial sum = p + q;
    const Polynomial prod = p * q;
    for (int k = 0; k < 100; ++k) {
      Eigen::Vector3d x(u(rng), u(rng), u(rng));
      const double px = p.Evaluate(x), qx = q.Evaluate(x);
      EXPECT_NEAR(sum.Evaluate(x), px + qx, 1e-10 * (1 + std::abs(px + qx)));
      EXPECT_NEAR(prod.Evaluate(x), px * qx, 1e-10 * (1 + std::abs(px * qx)));
    }
  }
}

TEST(PolynomialTest, CancellationDropsTerms) {
  Polynomial p(M({1, 0}), 2.0);
  p.AddTerm(M({1, 0}), -2.0);
  EXPECT_TRUE(p.IsZero());
  EXPECT_EQ(p.degree(), -1);
}

TEST(PolynomialTest, CanonicalTextRoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial p = RandomPolynomial(3, 4, &rng);
    const std::string text = ToCanonicalText(p);
    EXPECT_EQ(ParseCanonicalText(text), p);
  }
  const std::string expected =
      "nvars 2 terms 2\n0 0 : 1.5\n2 0 : -0.25\n";
  Polynomial p(2, 1.5);
  p.AddTerm(M({2, 0}), -0.25);
  EXPECT_EQ(ToCanonicalText(p), expected);
}

TEST(PolyMatrixTest, ConstantEvaluatesToItself) {
  Eigen::Matrix2d A;
  A << 1, 2, 2, 5;
  const PolyMatrix P = PolyMatrix::Constant(A, 2, true);
  EXPECT_TRUE(P.Evaluate(Eigen::Vector2d(3, -7)).isApprox(A));
}

TEST(PolyMatrixTest, ScaledIdentity) {
  PolyMatrix W(2, 2, 2, true);
  W.Set(0, 0, Polynomial(M({2, 0})));
  W.Set(1, 1, Polynomial(M({2, 0})));
  EXPECT_TRUE(W.Evaluate(Eigen::Vector2d(2, 0))
                  .isApprox(4.0 * Eigen::Matrix2d::Identity()));
}

TEST(PolyMatrixTest, SymmetricSetWritesBothEntries) {
  PolyMatrix W(2, 2, 1, true);
  W.Set(0, 1, Polynomial(M({1}), 3.0));
  EXPECT_EQ(W(1, 0), W(0, 1));
  EXPECT_THROW(PolyMatrix(2, 3, 1, true), std::invalid_argument);
}

TEST(PolyMatrixTest, EvaluationMatchesNaiveSummation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  PolyMatrix P(3, 3, 2, true);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) P.Set(i, j, RandomPolynomial(2, 2, &rng));
  }
  for (int k = 0; k < 20; ++k) {
    Eigen::Vector2d x(u(rng), u(rng));
    const Eigen::MatrixXd v = P.Evaluate(x);
    EXPECT_TRUE(v.isApprox(v.transpose()));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(v(i, j), NaiveEvaluate(P(i, j), x), 1e-12);
      }
    }
  }
  EXPECT_THROW(P.Evaluate(Eigen::Vector3d::Zero()), std::invalid_argument);
}

TEST(KroneckerTest, IdentityCaseReturnsVecOfTranspose) {
  Eigen::MatrixXd X(2, 2);
  X << 1, 2, 3, 4;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_TRUE(VecKron(I, I, X).isApprox(Vec(X.transpose())));
}

TEST(KroneckerTest, RandomInstancesAgree) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 2, q = 2, r = 3 - trial % 2, s = 2 + trial % 3;
    srand(static_cast<unsigned>(trial + 1));
    const Eigen::MatrixXd A = Eigen::MatrixXd::Random(p, q);
    const Eigen::MatrixXd X = Eigen::MatrixXd::Random(q, r);
    const Eigen::MatrixXd B = Eigen::MatrixXd::Random(r, s);
    // Direct expansion of both sides, entry by entry.
    const Eigen::MatrixXd left = B.transpose() * X.transpose() * A.transpose();
    Eigen::VectorXd right = Eigen::VectorXd::Zero(p * s);
    const Eigen::MatrixXd Xt = X.transpose();
    for (int i = 0; i < p; ++i) {
      for (int a = 0; a < s; ++a) {
        for (int j = 0; j < q; ++j) {
          for (int b = 0; b < r; ++b) {
            right(i * s + a) += A(i, j) * B(b, a) * Xt(b, j);
          }
        }
      }
    }
    const Eigen::VectorXd v = VecKron(A, B, X);
    EXPECT_LT((v - Vec(left)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT((v - right).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(KroneckerTest, DimensionMismatchThrows) {
  EXPECT_THROW(VecKron(Eigen::MatrixXd(2, 3), Eigen::MatrixXd(2, 2),
                       Eigen::MatrixXd(2, 2)),
               std::invalid_argument);
  EXPECT_THROW(TraceVecIdentity(Eigen::MatrixXd(2, 3), Eigen::MatrixXd(2, 3)),
               std::invalid_argument);
}

TEST(TraceVecTest, Examples) {
  EXPECT_DOUBLE_EQ(TraceVecIdentity(Eigen::Matrix2d::Identity(),
                                    Eigen::Matrix2d::Identity()),
                   2.0);
  EXPECT_DOUBLE_EQ(
      TraceVecIdentity(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Ones(3, 2)),
      0.0);
  for (int trial = 0; trial < 100; ++trial) {
    srand(static_cast<unsigned>(100 + trial));
    const Eigen::MatrixXd A = Eigen::MatrixXd::Random(2, 3);
    const Eigen::MatrixXd B = Eigen::MatrixXd::Random(3, 2);
    EXPECT_NEAR(TraceVecIdentity(A, B), (A * B).trace(), 1e-12);
  }
}

}  // namespace
}  // namespace ddccm
