#pragma once

#include <string>
#include <vector>

#include "ddccm/sim/simulate.h"

namespace ddccm {

/// Unstable linear plant with two inputs (eigenvalues 0.7291, 1.0030).
PolynomialPlant LinearExamplePlant();
/// Planar polynomial plant, not open-loop contractive, fully actuated.
PolynomialPlant Nonlinear2dExamplePlant();
/// Three-state polynomial plant actuated through x3 only.
PolynomialPlant Nonlinear3dExamplePlant();

/// "linear", "nonlinear2d" or "nonlinear3d"; throws std::invalid_argument
/// for other names.
PolynomialPlant ExamplePlant(const std::string& name);
std::vector<std::string> ExampleNames();

}  // namespace ddccm
