#include "ddccm/dualprog/certificate.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <json.hpp>

#include "ddccm/sos/gram.h"

namespace ddccm {

namespace {

using Json = nlohmann::ordered_json;

double MinEig(const Eigen::MatrixXd& Q) {
  if (Q.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

Eigen::MatrixXd Symmetrized(const Eigen::MatrixXd& Q) {
  return 0.5 * (Q + Q.transpose());
}

PolyMatrix ScalarIdentity(int n, double t) {
  return PolyMatrix::Constant(t * Eigen::MatrixXd::Identity(n, n), n, true);
}

// The symmetric matrix formed from the upper triangle of A.
PolyMatrix UpperSymmetric(const PolyMatrix& A) {
  PolyMatrix S(A.rows(), A.cols(), A.num_vars(), true);
  for (int r = 0; r < A.rows(); ++r) {
    for (int c = r; c < A.cols(); ++c) S.Set(r, c, A(r, c));
  }
  return S;
}

std::vector<PolyMatrix> MultiplierDifferences(const Certificate& cert,
                                              const ConsistencySet& set) {
  const int n = set.n();
  std::vector<PolyMatrix> D;
  D.reserve(set.T() * n);
  for (int i = 0; i < set.T(); ++i) {
    for (int k = 0; k < n; ++k) {
      const GramValue& plus = cert.multipliers[ConsistencySet::Index(n, i, k, 1)];
      const GramValue& minus = cert.multipliers[ConsistencySet::Index(n, i, k, -1)];
      GramValue diff = plus;
      diff.Q = plus.Q - minus.Q;
      D.push_back(diff.ToPolyMatrix(n));
    }
  }
  return D;
}

// Zero-constraint identity for (l, k), as a symmetric matrix.
PolyMatrix ZeroResidual(const Certificate& cert, const ConsistencySet& set,
                        const PolyMatrix& jac, const std::vector<PolyMatrix>& D,
                        const std::vector<PolyMatrix>& dW, int l, int k) {
  const int n = set.n();
  PolyMatrix grad(n, 1, n, false);
  for (int j = 0; j < n; ++j) grad.Set(j, 0, jac(l, j));
  const PolyMatrix Wg = cert.W * grad;
  PolyMatrix R(n, n, n, true);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      Polynomial e(n);
      if (r == k) e += Wg(c, 0);
      if (c == k) e += Wg(r, 0);
      e -= dW[k](r, c) * Polynomial(set.dict()[l], 1.0);
      R.Set(r, c, e);
    }
  }
  for (int i = 0; i < set.T(); ++i) {
    const double v = set.phi_values()(l, i);
    if (v != 0.0) R = R - D[i * n + k] * v;
  }
  return UpperSymmetric(R);
}

void ProjectOrthogonal(Certificate* cert) {
  const int n = cert->n;
  if (cert->deg_w == 0 || cert->G.size() == 0 ||
      cert->G.cwiseAbs().maxCoeff() == 0.0) {
    return;
  }
  const auto alphas = MonomialsUpToDegree(n, cert->deg_w);
  const auto betas = MonomialsUpToDegree(n, cert->deg_w - 1);
  std::map<Monomial, int> beta_index;
  for (size_t b = 0; b < betas.size(); ++b) beta_index[betas[b]] = b;
  const int m = static_cast<int>(cert->G.cols() * betas.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, alphas.size());
  for (int col = 0; col < cert->G.cols(); ++col) {
    for (size_t a = 0; a < alphas.size(); ++a) {
      for (int j = 0; j < n; ++j) {
        const auto [factor, dm] = alphas[a].Differentiate(j);
        if (factor == 0) continue;
        A(col * betas.size() + beta_index.at(dm), a) += cert->G(j, col) * factor;
      }
    }
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  PolyMatrix W(n, n, n, true);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      Eigen::VectorXd w(alphas.size());
      for (size_t a = 0; a < alphas.size(); ++a) {
        w(a) = cert->W(r, c).coefficient(alphas[a]);
      }
      w -= cod.solve(A * w);
      Polynomial p(n);
      for (size_t a = 0; a < alphas.size(); ++a) {
        if (w(a) != 0.0) p.AddTerm(alphas[a], w(a));
      }
      W.Set(r, c, p);
    }
  }
  cert->W = W;
}

// Least-norm change of the multiplier differences that zeroes every
// zero-constraint identity; split into PSD parts added to N+ and N-.
void RepairZeroConstraint(Certificate* cert, const ConsistencySet& set) {
  const int n = set.n();
  const int L = set.L();
  const PolyMatrix jac = Jacobian(set.dict());
  const std::vector<PolyMatrix> D = MultiplierDifferences(*cert, set);
  std::vector<PolyMatrix> dW;
  for (int k = 0; k < n; ++k) dW.push_back(cert->W.Differentiate(k));
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
      set.phi_values());
  for (int k = 0; k < n; ++k) {
    // (r, c, monomial) -> residual coefficient per l.
    std::map<std::tuple<int, int, Monomial>, Eigen::VectorXd> rhs;
    for (int l = 0; l < L; ++l) {
      const PolyMatrix R = ZeroResidual(*cert, set, jac, D, dW, l, k);
      for (int r = 0; r < n; ++r) {
        for (int c = r; c < n; ++c) {
          for (const auto& [m, v] : R(r, c).terms()) {
            auto [it, inserted] =
                rhs.try_emplace({r, c, m}, Eigen::VectorXd::Zero(L));
            it->second(l) = v;
          }
        }
      }
    }
    if (rhs.empty()) continue;
    std::vector<PolyMatrix> delta(set.T(), PolyMatrix(n, n, n, true));
    for (const auto& [key, b] : rhs) {
      const auto& [r, c, m] = key;
      const Eigen::VectorXd d = cod.solve(b);
      for (int i = 0; i < set.T(); ++i) {
        if (d(i) != 0.0) delta[i].AddTo(r, c, Polynomial(m, d(i)));
      }
    }
    for (int i = 0; i < set.T(); ++i) {
      GramValue& plus = cert->multipliers[ConsistencySet::Index(n, i, k, 1)];
      GramValue& minus = cert->multipliers[ConsistencySet::Index(n, i, k, -1)];
      const Eigen::MatrixXd dQ =
          MinNormGram(n, n, plus.basis, UpperSymmetric(delta[i]));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrized(dQ));
      const Eigen::VectorXd e = eig.eigenvalues();
      const Eigen::MatrixXd& V = eig.eigenvectors();
      plus.Q += V * e.cwiseMax(0.0).asDiagonal() * V.transpose();
      minus.Q += V * (-e).cwiseMax(0.0).asDiagonal() * V.transpose();
    }
  }
}

void ClipToPsd(Eigen::MatrixXd* Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrized(*Q));
  if (eig.eigenvalues()(0) >= 0.0) return;
  const Eigen::MatrixXd& V = eig.eigenvectors();
  *Q = V * eig.eigenvalues().cwiseMax(0.0).asDiagonal() * V.transpose();
}

// Refits the metric and positivity Gram matrices to the current W, rho, N.
void RefitGrams(Certificate* cert, const ConsistencySet& set) {
  const int n = cert->n;
  const PolyMatrix w_gap =
      UpperSymmetric(cert->W - ScalarIdentity(n, cert->t) -
                     cert->W_gram.ToPolyMatrix(n));
  cert->W_gram.Q += MinNormGram(n, n, cert->W_gram.basis, w_gap);
  const PolyMatrix pos = PositivityMatrix(*cert, set);
  const PolyMatrix p_gap =
      UpperSymmetric(pos - ScalarIdentity(n, cert->t) - RegionTerm(*cert) -
                     cert->positivity_gram.ToPolyMatrix(n));
  cert->positivity_gram.Q +=
      MinNormGram(n, n, cert->positivity_gram.basis, p_gap);
}

bool Acceptable(const Certificate& c, const ExtractOptions& o,
                std::string* why) {
  const ConditionReport& r = c.after;
  auto psd_ok = [&](double min_eig, const Eigen::MatrixXd& Q) {
    return min_eig >= -o.psd_tol * std::max(1.0, Q.norm());
  };
  if (!(c.t > 0.0)) {
    *why = "non-positive margin t";
  } else if (!(r.zero_residual <= o.residual_tol)) {
    *why = "zero-constraint residual " + std::to_string(r.zero_residual);
  } else if (!(r.orthogonal_residual <= o.residual_tol)) {
    *why = "G-orthogonality residual " + std::to_string(r.orthogonal_residual);
  } else if (!psd_ok(r.metric_min_eig, c.W_gram.Q)) {
    *why = "metric Gram eigenvalue " + std::to_string(r.metric_min_eig);
  } else if (!psd_ok(r.positivity_min_eig, c.positivity_gram.Q)) {
    *why = "positivity Gram eigenvalue " + std::to_string(r.positivity_min_eig);
  } else if (!(r.multiplier_min_eig >= -o.psd_tol)) {
    *why = "multiplier eigenvalue " + std::to_string(r.multiplier_min_eig);
  } else {
    return true;
  }
  return false;
}

Certificate Refine(const Certificate& raw, const ConsistencySet& set,
                   bool prune, const ExtractOptions& o) {
  Certificate c = raw;
  c.pruning_applied = prune;
  c.pruned_coefficients = 0;
  if (prune) {
    const PolyMatrix W = c.W.Pruned(o.prune_tol);
    for (int r = 0; r < c.n; ++r) {
      for (int col = r; col < c.n; ++col) {
        c.pruned_coefficients += static_cast<int>(c.W(r, col).terms().size() -
                                                  W(r, col).terms().size());
      }
    }
    const Polynomial rho = c.rho.Pruned(o.prune_tol);
    c.pruned_coefficients +=
        static_cast<int>(c.rho.terms().size() - rho.terms().size());
    c.W = W;
    c.rho = rho;
  }
  ProjectOrthogonal(&c);
  for (auto& g : c.multipliers) ClipToPsd(&g.Q);
  RepairZeroConstraint(&c, set);
  RefitGrams(&c, set);
  c.after = CheckConditions(c, set);
  return c;
}

Json MonomialJson(const Monomial& m) { return Json(m.exponents()); }

Monomial MonomialFromJson(const Json& j) {
  return Monomial(j.get<std::vector<int>>());
}

Json PolynomialJson(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back(Json{{"exponents", MonomialJson(m)}, {"coefficient", c}});
  }
  return terms;
}

Polynomial PolynomialFromJson(const Json& j, int num_vars) {
  Polynomial p(num_vars);
  for (const auto& t : j) {
    p.AddTerm(MonomialFromJson(t.at("exponents")),
              t.at("coefficient").get<double>());
  }
  return p;
}

Json MatrixJson(const Eigen::MatrixXd& A) {
  Json rows = Json::array();
  for (int i = 0; i < A.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const Json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd A(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) {
      throw std::runtime_error("ragged matrix in certificate");
    }
    for (int c = 0; c < cols; ++c) A(i, c) = j[i][c].get<double>();
  }
  return A;
}

Json GramJson(const GramValue& g) {
  Json basis = Json::array();
  for (const auto& m : g.basis) basis.push_back(MonomialJson(m));
  return Json{{"basis", basis}, {"blockdim", g.blockdim}, {"Q", MatrixJson(g.Q)}};
}

GramValue GramFromJson(const Json& j) {
  GramValue g;
  for (const auto& m : j.at("basis")) g.basis.push_back(MonomialFromJson(m));
  g.blockdim = j.at("blockdim").get<int>();
  g.Q = MatrixFromJson(j.at("Q"));
  if (g.Q.rows() != static_cast<int>(g.basis.size()) * g.blockdim) {
    throw std::runtime_error("Gram size does not match its basis");
  }
  return g;
}

Json ReportJson(const ConditionReport& r) {
  return Json{{"zero_residual", r.zero_residual},
              {"orthogonal_residual", r.orthogonal_residual},
              {"positivity_identity", r.positivity_identity},
              {"positivity_min_eig", r.positivity_min_eig},
              {"metric_identity", r.metric_identity},
              {"metric_min_eig", r.metric_min_eig},
              {"multiplier_min_eig", r.multiplier_min_eig}};
}

ConditionReport ReportFromJson(const Json& j) {
  ConditionReport r;
  r.zero_residual = j.at("zero_residual").get<double>();
  r.orthogonal_residual = j.at("orthogonal_residual").get<double>();
  r.positivity_identity = j.at("positivity_identity").get<double>();
  r.positivity_min_eig = j.at("positivity_min_eig").get<double>();
  r.metric_identity = j.at("metric_identity").get<double>();
  r.metric_min_eig = j.at("metric_min_eig").get<double>();
  r.multiplier_min_eig = j.at("multiplier_min_eig").get<double>();
  return r;
}

SolveStatus StatusFromString(const std::string& s) {
  for (SolveStatus st : {SolveStatus::kFeasible, SolveStatus::kInfeasibleCertified,
                         SolveStatus::kNumericalFailure}) {
    if (ToString(st) == s) return st;
  }
  throw std::runtime_error("unknown solver status: " + s);
}

}  // namespace

Eigen::MatrixXd GramValue::Evaluate(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int nb = static_cast<int>(basis.size());
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(nb * blockdim, blockdim);
  for (int p = 0; p < nb; ++p) {
    const double v = basis[p].Evaluate(x);
    for (int r = 0; r < blockdim; ++r) V(p * blockdim + r, r) = v;
  }
  return V.transpose() * Q * V;
}

PolyMatrix GramValue::ToPolyMatrix(int num_vars) const {
  return Reconstruct(num_vars, blockdim, basis, Symmetrized(Q));
}

double Certificate::Mu(int a, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return y.dot(multipliers.at(a).Evaluate(x) * y);
}

PolyMatrix PositivityMatrix(const Certificate& cert, const ConsistencySet& set) {
  const int n = cert.n;
  PolyMatrix P = cert.W * (-2.0 * cert.lambda);
  if (!cert.rho.IsZero()) {
    P = P + PolyMatrix::Constant(cert.G * cert.G.transpose(), n, true) * cert.rho;
  }
  if (!cert.multipliers.empty()) {
    GramValue sum = cert.multipliers[0];
    sum.Q.setZero();
    for (int a = 0; a < set.size(); ++a) sum.Q += set.d(a) * cert.multipliers[a].Q;
    P = P - sum.ToPolyMatrix(n);
  }
  return UpperSymmetric(P);
}

PolyMatrix RegionTerm(const Certificate& cert) {
  const int n = cert.n;
  PolyMatrix S(n, n, n, true);
  const double r2 = cert.region_radius * cert.region_radius;
  for (int j = 0; j < static_cast<int>(cert.region_multipliers.size()); ++j) {
    Polynomial g(n, r2);
    g.AddTerm(Monomial::Variable(n, j, 2), -1.0);
    S = S + cert.region_multipliers[j].ToPolyMatrix(n) * g;
  }
  return UpperSymmetric(S);
}

bool InRegion(const Certificate& cert,
              const Eigen::Ref<const Eigen::VectorXd>& x) {
  return cert.region_radius <= 0.0 ||
         x.cwiseAbs().maxCoeff() <= cert.region_radius;
}

ConditionReport CheckConditions(const Certificate& cert,
                                const ConsistencySet& set) {
  const int n = cert.n;
  if (set.n() != n || static_cast<int>(cert.multipliers.size()) != set.size()) {
    throw std::invalid_argument("certificate does not match the data");
  }
  ConditionReport r;
  const PolyMatrix jac = Jacobian(set.dict());
  const std::vector<PolyMatrix> D = MultiplierDifferences(cert, set);
  std::vector<PolyMatrix> dW;
  for (int k = 0; k < n; ++k) dW.push_back(cert.W.Differentiate(k));
  for (int l = 0; l < set.L(); ++l) {
    for (int k = 0; k < n; ++k) {
      r.zero_residual = std::max(
          r.zero_residual,
          ZeroResidual(cert, set, jac, D, dW, l, k).MaxAbsCoefficient());
    }
  }
  for (int c = 0; c < cert.G.cols(); ++c) {
    PolyMatrix e(n, n, n, true);
    for (int j = 0; j < n; ++j) {
      if (cert.G(j, c) != 0.0) e = e + dW[j] * cert.G(j, c);
    }
    r.orthogonal_residual = std::max(r.orthogonal_residual, e.MaxAbsCoefficient());
  }
  const PolyMatrix I = ScalarIdentity(n, cert.t);
  r.positivity_identity = (PositivityMatrix(cert, set) - I - RegionTerm(cert) -
                           cert.positivity_gram.ToPolyMatrix(n))
                              .MaxAbsCoefficient();
  r.positivity_min_eig = MinEig(Symmetrized(cert.positivity_gram.Q));
  for (const auto& g : cert.region_multipliers) {
    r.positivity_min_eig = std::min(r.positivity_min_eig, MinEig(Symmetrized(g.Q)));
  }
  r.metric_identity =
      (cert.W - I - cert.W_gram.ToPolyMatrix(n)).MaxAbsCoefficient();
  r.metric_min_eig = MinEig(Symmetrized(cert.W_gram.Q));
  r.multiplier_min_eig = std::numeric_limits<double>::infinity();
  for (const auto& g : cert.multipliers) {
    r.multiplier_min_eig = std::min(r.multiplier_min_eig, MinEig(Symmetrized(g.Q)));
  }
  if (cert.multipliers.empty()) r.multiplier_min_eig = 0.0;
  return r;
}

Certificate ExtractCertificate(const DualProgram& dp, const ConsistencySet& set,
                               const ConicSolution& sol,
                               const ExtractOptions& options) {
  const int n = dp.n;
  if (static_cast<int>(sol.X.size()) != dp.program.num_blocks() ||
      sol.w.size() != dp.program.num_free()) {
    throw std::invalid_argument("solution does not match the program");
  }
  Certificate raw;
  raw.n = n;
  raw.lambda = dp.options.lambda;
  raw.deg_w = dp.options.deg_w;
  raw.deg_mu_x = dp.deg_mu_x;
  raw.deg_rho = dp.rho_basis.empty() ? 0 : dp.deg_rho;
  raw.margin = dp.options.margin;
  raw.optimal_t = sol.w(dp.t_var);
  raw.dict = set.dict();
  raw.G = set.G();
  raw.solver.status = sol.status;
  raw.solver.iterations = sol.iterations;
  raw.solver.wall_time = sol.wall_time;
  raw.solver.primal_linf = sol.residuals.primal_linf;
  raw.solver.dual_rel = sol.residuals.dual_rel;
  raw.solver.gap = sol.residuals.gap;
  raw.solver.message = sol.message;

  auto gram = [&](const GramBlock& g) {
    return GramValue{g.basis, g.blockdim, Symmetrized(sol.X[g.block])};
  };
  raw.W_gram = gram(dp.w_gram);
  raw.positivity_gram = gram(dp.positivity_gram);
  for (const auto& g : dp.multipliers) raw.multipliers.push_back(gram(g));
  raw.region_radius = dp.region_grams.empty() ? 0.0 : dp.options.region_radius;
  for (const auto& g : dp.region_grams) raw.region_multipliers.push_back(gram(g));
  raw.t = raw.optimal_t;
  raw.rho = Polynomial(n);
  for (size_t k = 0; k < dp.rho_basis.size(); ++k) {
    raw.rho.AddTerm(dp.rho_basis[k], sol.w(dp.rho_vars[k]));
  }
  raw.W = UpperSymmetric(raw.W_gram.ToPolyMatrix(n) + ScalarIdentity(n, raw.t));

  // Everything is homogeneous; scale W to unit largest coefficient so the
  // pruning threshold is meaningful.
  const double wmax = raw.W.MaxAbsCoefficient();
  if (!(wmax > 0.0)) {
    throw CertificateRejected("W vanishes", CheckConditions(raw, set));
  }
  const double s = 1.0 / wmax;
  raw.W = raw.W * s;
  raw.W_gram.Q *= s;
  raw.positivity_gram.Q *= s;
  for (auto& g : raw.multipliers) g.Q *= s;
  for (auto& g : raw.region_multipliers) g.Q *= s;
  raw.rho *= s;
  raw.t *= s;
  raw.before = CheckConditions(raw, set);
  raw.after = raw.before;

  std::string why_pruned, why_plain;
  Certificate pruned = Refine(raw, set, true, options);
  if (Acceptable(pruned, options, &why_pruned)) return pruned;
  Certificate plain = Refine(raw, set, false, options);
  if (Acceptable(plain, options, &why_plain)) return plain;
  throw CertificateRejected("certificate rejected: " + why_pruned +
                                " (pruned), " + why_plain + " (unpruned)",
                            plain.after);
}

std::string CertificateToJson(const Certificate& c) {
  Json dict = Json::array();
  for (const auto& m : c.dict.entries()) dict.push_back(MonomialJson(m));
  Json W = Json::array();
  for (int r = 0; r < c.n; ++r) {
    Json row = Json::array();
    for (int col = 0; col < c.n; ++col) row.push_back(PolynomialJson(c.W(r, col)));
    W.push_back(row);
  }
  Json multipliers = Json::array();
  for (const auto& g : c.multipliers) multipliers.push_back(GramJson(g));
  Json region = Json::array();
  for (const auto& g : c.region_multipliers) region.push_back(GramJson(g));
  Json j{{"format", "ddccm-certificate"},
         {"version", 1},
         {"n", c.n},
         {"lambda", c.lambda},
         {"deg_w", c.deg_w},
         {"deg_mu_x", c.deg_mu_x},
         {"deg_rho", c.deg_rho},
         {"margin", c.margin},
         {"optimal_t", c.optimal_t},
         {"t", c.t},
         {"dictionary", dict},
         {"G", MatrixJson(c.G)},
         {"W", W},
         {"W_gram", GramJson(c.W_gram)},
         {"rho", PolynomialJson(c.rho)},
         {"positivity_gram", GramJson(c.positivity_gram)},
         {"multipliers", multipliers},
         {"region_radius", c.region_radius},
         {"region_multipliers", region},
         {"residuals_before", ReportJson(c.before)},
         {"residuals_after", ReportJson(c.after)},
         {"pruned_coefficients", c.pruned_coefficients},
         {"pruning_applied", c.pruning_applied},
         {"solver",
          Json{{"status", ToString(c.solver.status)},
               {"iterations", c.solver.iterations},
               {"primal_linf", c.solver.primal_linf},
               {"dual_rel", c.solver.dual_rel},
               {"gap", c.solver.gap},
               {"message", c.solver.message}}}};
  return j.dump(1);
}

Certificate CertificateFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("malformed certificate JSON: ") +
                             e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "ddccm-certificate") {
      throw std::runtime_error("not a certificate file");
    }
    Certificate c;
    c.n = j.at("n").get<int>();
    c.lambda = j.at("lambda").get<double>();
    c.deg_w = j.at("deg_w").get<int>();
    c.deg_mu_x = j.at("deg_mu_x").get<int>();
    c.deg_rho = j.at("deg_rho").get<int>();
    c.margin = j.at("margin").get<double>();
    c.optimal_t = j.at("optimal_t").get<double>();
    c.t = j.at("t").get<double>();
    std::vector<Monomial> dict;
    for (const auto& m : j.at("dictionary")) dict.push_back(MonomialFromJson(m));
    c.dict = MonomialDictionary(dict);
    c.G = MatrixFromJson(j.at("G"));
    if (c.G.rows() == 0) c.G.resize(c.n, 0);
    c.W = PolyMatrix(c.n, c.n, c.n, true);
    for (int r = 0; r < c.n; ++r) {
      for (int col = r; col < c.n; ++col) {
        c.W.Set(r, col, PolynomialFromJson(j.at("W").at(r).at(col), c.n));
      }
    }
    c.W_gram = GramFromJson(j.at("W_gram"));
    c.rho = PolynomialFromJson(j.at("rho"), c.n);
    c.positivity_gram = GramFromJson(j.at("positivity_gram"));
    for (const auto& g : j.at("multipliers")) c.multipliers.push_back(GramFromJson(g));
    c.region_radius = j.value("region_radius", 0.0);
    if (j.contains("region_multipliers")) {
      for (const auto& g : j.at("region_multipliers")) {
        c.region_multipliers.push_back(GramFromJson(g));
      }
    }
    c.before = ReportFromJson(j.at("residuals_before"));
    c.after = ReportFromJson(j.at("residuals_after"));
    c.pruned_coefficients = j.at("pruned_coefficients").get<int>();
    c.pruning_applied = j.at("pruning_applied").get<bool>();
    const Json& s = j.at("solver");
    c.solver.status = StatusFromString(s.at("status").get<std::string>());
    c.solver.iterations = s.at("iterations").get<int>();
    c.solver.primal_linf = s.at("primal_linf").get<double>();
    c.solver.dual_rel = s.at("dual_rel").get<double>();
    c.solver.gap = s.at("gap").get<double>();
    c.solver.message = s.at("message").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("invalid certificate: ") + e.what());
  }
}

}  // namespace ddccm
