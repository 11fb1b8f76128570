#include "ddccm/dualprog/dual_program.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ddccm {

namespace {

int Binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

int RoundUpEven(int d) { return d + (d % 2); }

}  // namespace

int MinimumMultiplierDegree(int p, int q) { return std::max(0, 2 * q + p - 1); }

std::vector<int> AlignedActuatedVariables(const Eigen::MatrixXd& G) {
  std::vector<int> vars;
  for (int c = 0; c < G.cols(); ++c) {
    int nonzero = 0, last = -1;
    for (int j = 0; j < G.rows(); ++j) {
      if (G(j, c) != 0.0) {
        ++nonzero;
        last = j;
      }
    }
    if (nonzero == 1 && std::find(vars.begin(), vars.end(), last) == vars.end()) {
      vars.push_back(last);
    }
  }
  std::sort(vars.begin(), vars.end());
  return vars;
}

DualProgram Assemble(const ConsistencySet& set,
                     const DualProgramOptions& options) {
  if (set.T() == 0 || set.n() == 0) {
    throw std::invalid_argument("empty consistency set");
  }
  if (options.deg_w != 0 && options.deg_w != 2) {
    throw std::invalid_argument("W degree must be 0 or 2");
  }
  if (!(options.lambda >= 0.0) || !(options.margin >= 0.0) ||
      !(options.region_radius >= 0.0)) {
    throw std::invalid_argument(
        "lambda, margin and region radius must be non-negative");
  }
  const int n = set.n();
  const int L = set.L();
  const int T = set.T();
  const int p = set.dict().max_degree();

  DualProgram dp;
  dp.options = options;
  dp.n = n;
  dp.q = options.deg_w / 2;
  const int min_mu = MinimumMultiplierDegree(p, dp.q);
  dp.deg_mu_x = options.deg_mu_x < 0 ? min_mu : options.deg_mu_x;
  if (dp.deg_mu_x < min_mu) {
    throw std::invalid_argument("multiplier degree " +
                                std::to_string(dp.deg_mu_x) +
                                " is below the minimum " +
                                std::to_string(min_mu));
  }
  const bool has_input = set.G().size() > 0 && set.G().cwiseAbs().maxCoeff() > 0;
  dp.deg_rho = options.deg_rho < 0 ? RoundUpEven(dp.deg_mu_x) : options.deg_rho;
  ConicProgram& prog = dp.program;

  // W.
  std::vector<int> aligned;
  if (options.facial_reduction && has_input) {
    aligned = AlignedActuatedVariables(set.G());
  }
  for (int j = 0; j < n; ++j) {
    if (std::find(aligned.begin(), aligned.end(), j) == aligned.end()) {
      dp.w_vars.push_back(j);
    }
  }
  const auto w_basis = MonomialsUpToDegree(n, dp.q, dp.w_vars);
  dp.w_gram = GramParametrize(&prog, n, n, w_basis, "W", true);
  dp.t_var = prog.AddFreeVariable("t");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  dp.W = dp.w_gram.target;
  dp.W.AddOuter(LinearExpr::Variable(FreeVar(dp.t_var)), Polynomial(n, 1.0), I);

  // Multipliers mu_a(x, y) = y' N_a(x) y.
  const auto mu_basis = MonomialsUpToDegree(n, (dp.deg_mu_x + 1) / 2);
  dp.multipliers.reserve(set.size());
  for (int a = 0; a < set.size(); ++a) {
    const std::string name = "N_" + std::to_string(set.sample_of(a)) + "_" +
                             std::to_string(set.component_of(a)) +
                             (set.sign_of(a) > 0 ? "+" : "-");
    dp.multipliers.push_back(GramParametrize(&prog, n, n, mu_basis, name, true));
  }

  // rho.
  if (has_input) {
    dp.rho_basis = MonomialsUpToDegree(n, dp.deg_rho);
    for (size_t k = 0; k < dp.rho_basis.size(); ++k) {
      dp.rho_vars.push_back(prog.AddFreeVariable("rho_" + std::to_string(k)));
    }
  }

  // Zero constraint, one identity per (l, k):
  //   e_k (W dphi_l)' + (W dphi_l) e_k' - phi_l dW/dx_k
  //     - sum_i (N+_{i,k} - N-_{i,k}) phi_l(x[i]) = 0.
  const PolyMatrix jac = Jacobian(set.dict());
  std::vector<SymbolicPolyMatrix> dW;
  for (int k = 0; k < n; ++k) dW.push_back(dp.W.Differentiate(k));
  for (int l = 0; l < L; ++l) {
    PolyMatrix grad(n, 1, n, false);
    for (int j = 0; j < n; ++j) grad.Set(j, 0, jac(l, j));
    const SymbolicPolyMatrix Wg = dp.W.RightMultiply(grad);
    const Polynomial phi_l(set.dict()[l], 1.0);
    for (int k = 0; k < n; ++k) {
      PolyMatrix ek(1, n, n, false);
      ek.Set(0, k, Polynomial(n, 1.0));
      SymbolicPolyMatrix e = Wg.RightMultiply(ek);
      e.AddScaled(e.Transpose(), 1.0);
      e.AddScaled(dW[k] * phi_l, -1.0);
      for (int i = 0; i < T; ++i) {
        const double v = set.phi_values()(l, i);
        if (v == 0.0) continue;
        e.AddScaled(dp.multipliers[ConsistencySet::Index(n, i, k, +1)].target, -v);
        e.AddScaled(dp.multipliers[ConsistencySet::Index(n, i, k, -1)].target, v);
      }
      const LinearConstraintSet rows = EquateZero(&prog, e, true);
      dp.zero_rows.rows.insert(dp.zero_rows.rows.end(), rows.rows.begin(),
                               rows.rows.end());
      dp.zero_rows.origins.insert(dp.zero_rows.origins.end(),
                                  rows.origins.begin(), rows.origins.end());
    }
  }

  // G-orthogonality: sum_j dW/dx_j g_j = 0 for every column g. Aligned
  // columns hold by construction under facial reduction.
  for (int c = 0; c < (has_input ? set.G().cols() : 0); ++c) {
    int nonzero = 0;
    for (int j = 0; j < n; ++j) nonzero += set.G()(j, c) != 0.0;
    if (options.facial_reduction && nonzero == 1) continue;
    SymbolicPolyMatrix e(n, n, n);
    for (int j = 0; j < n; ++j) {
      if (set.G()(j, c) != 0.0) e.AddScaled(dW[j], set.G()(j, c));
    }
    const LinearConstraintSet rows = EquateZero(&prog, e, true);
    dp.orthogonal_rows.rows.insert(dp.orthogonal_rows.rows.end(),
                                   rows.rows.begin(), rows.rows.end());
    dp.orthogonal_rows.origins.insert(dp.orthogonal_rows.origins.end(),
                                      rows.origins.begin(), rows.origins.end());
  }

  // Positivity: -2 lambda W + rho G G' - sum_a d_a N_a - t I is SOS.
  SymbolicPolyMatrix pos = dp.W * (-2.0 * options.lambda);
  if (has_input) {
    const Eigen::MatrixXd GGt = set.G() * set.G().transpose();
    for (size_t k = 0; k < dp.rho_basis.size(); ++k) {
      pos.AddOuter(LinearExpr::Variable(FreeVar(dp.rho_vars[k])),
                   Polynomial(dp.rho_basis[k], 1.0), GGt);
    }
  }
  for (int a = 0; a < set.size(); ++a) {
    const double d = set.d(a);
    if (d != 0.0) pos.AddScaled(dp.multipliers[a].target, -d);
  }
  int deg_pos = std::max(2 * dp.q, 2 * ((dp.deg_mu_x + 1) / 2));
  if (has_input) deg_pos = std::max(deg_pos, RoundUpEven(dp.deg_rho));
  if (options.region_radius > 0.0) {
    deg_pos = std::max(deg_pos, 2);
    const auto region_basis = MonomialsUpToDegree(n, deg_pos / 2 - 1);
    const double r2 = options.region_radius * options.region_radius;
    for (int j = 0; j < n; ++j) {
      Polynomial g(n, r2);
      g.AddTerm(Monomial::Variable(n, j, 2), -1.0);
      dp.region_grams.push_back(GramParametrize(
          &prog, n, n, region_basis, "S_box" + std::to_string(j), true));
      pos.AddScaled(dp.region_grams.back().target * g, -1.0);
    }
  }
  MarginResult margin = PsdMargin(&prog, pos,
                                  LinearExpr::Variable(FreeVar(dp.t_var)),
                                  MarginShape::kConstant, "S0", true,
                                  MonomialsUpToDegree(n, deg_pos / 2));
  dp.positivity_gram = std::move(margin.gram);
  dp.positivity_rows = std::move(margin.constraints);

  // Normalization and objective.
  dp.normalization_row = prog.AddRow(1.0);
  prog.AddAtomCoefficient(dp.normalization_row, dp.w_gram.trace_atom, 1.0);
  prog.AddAtomCoefficient(dp.normalization_row, dp.positivity_gram.trace_atom,
                          1.0);
  for (const auto& g : dp.multipliers) {
    prog.AddAtomCoefficient(dp.normalization_row, g.trace_atom, 1.0);
  }
  for (const auto& g : dp.region_grams) {
    prog.AddAtomCoefficient(dp.normalization_row, g.trace_atom, 1.0);
  }
  prog.AddFreeCoefficient(dp.normalization_row, dp.t_var, 2.0 * n);
  if (options.fixed_t >= 0.0) {
    prog.AddFreeCoefficient(prog.AddRow(options.fixed_t), dp.t_var, 1.0);
  } else {
    prog.AddObjectiveFree(dp.t_var, -1.0);
  }

  SizeReport& s = dp.sizes;
  s.n = n;
  s.q = dp.q;
  s.T = T;
  s.L = L;
  s.w_gram_nominal = n * Binomial(n + dp.q, dp.q);
  s.w_gram_effective = dp.w_gram.size();
  s.num_multipliers = static_cast<int>(dp.multipliers.size());
  s.multiplier_gram_dim = dp.multipliers.empty() ? 0 : dp.multipliers[0].size();
  s.positivity_gram_dim = dp.positivity_gram.size();
  s.region_gram_dim = dp.region_grams.empty() ? 0 : dp.region_grams[0].size();
  s.rho_terms = static_cast<int>(dp.rho_basis.size());
  s.rows_positivity = dp.positivity_rows.size();
  s.rows_zero = dp.zero_rows.size();
  s.rows_orthogonal = dp.orthogonal_rows.size();
  s.num_rows = prog.num_rows();
  s.num_blocks = prog.num_blocks();
  return dp;
}

}  // namespace ddccm
