#include "ddccm/sim/examples.h"

#include <stdexcept>

namespace ddccm {

namespace {

Monomial Mono(std::vector<int> e) { return Monomial(std::move(e)); }

}  // namespace

PolynomialPlant LinearExamplePlant() {
  PolynomialPlant p;
  p.dict = MonomialDictionary({Mono({1, 0}), Mono({0, 1})});
  p.F.resize(2, 2);
  p.F << 0.4285, -0.4298, 0.4018, 1.3036;
  p.G.resize(2, 2);
  p.G << -0.7826, 0.7731, -0.5110, 0.0339;
  return p;
}

PolynomialPlant Nonlinear2dExamplePlant() {
  PolynomialPlant p;
  // phi = (x1, x2, x1^2, x1^3).
  p.dict = MonomialDictionary({Mono({1, 0}), Mono({0, 1}), Mono({2, 0}),
                               Mono({3, 0})});
  p.F.resize(2, 4);
  p.F << 0.0, -1.0, -1.5, -0.5,
         3.0, 1.0, 0.0, 0.0;
  p.G = Eigen::MatrixXd::Identity(2, 2);
  return p;
}

PolynomialPlant Nonlinear3dExamplePlant() {
  PolynomialPlant p;
  // phi = (x1, x2, x3, x1^2, x1 x3).
  p.dict = MonomialDictionary({Mono({1, 0, 0}), Mono({0, 1, 0}),
                               Mono({0, 0, 1}), Mono({2, 0, 0}),
                               Mono({1, 0, 1})});
  p.F.resize(3, 5);
  p.F << -1.0, 0.0, 1.0, 0.0, 0.0,
         0.0, -1.0, 1.0, 1.0, -2.0,
         0.0, -1.0, 0.0, 0.0, 0.0;
  p.G = Eigen::MatrixXd::Zero(3, 1);
  p.G(2, 0) = 1.0;
  return p;
}

PolynomialPlant ExamplePlant(const std::string& name) {
  if (name == "linear") return LinearExamplePlant();
  if (name == "nonlinear2d") return Nonlinear2dExamplePlant();
  if (name == "nonlinear3d") return Nonlinear3dExamplePlant();
  throw std::invalid_argument("unknown example: " + name);
}

std::vector<std::string> ExampleNames() {
  return {"linear", "nonlinear2d", "nonlinear3d"};
}

}  // namespace ddccm
