#include "ddccm/verify/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ddccm/sdp/solver.h"

namespace ddccm {

namespace {

using Json = nlohmann::ordered_json;

// Rows a_a' f <= d_a of the consistency set in the coordinates
// f = vec(F) with F(k, l) at k * L + l.
struct Polytope {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

Polytope MakePolytope(const ConsistencySet& set) {
  const int n = set.n(), L = set.L();
  Polytope p;
  p.A = Eigen::MatrixXd::Zero(set.size(), n * L);
  p.b = set.ds();
  for (int a = 0; a < set.size(); ++a) {
    const Eigen::MatrixXd Phi = set.Phi(a);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < L; ++l) p.A(a, k * L + l) = Phi(l, k);
    }
  }
  return p;
}

Eigen::MatrixXd Unvec(const Eigen::VectorXd& f, int n, int L) {
  Eigen::MatrixXd F(n, L);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < L; ++l) F(k, l) = f(k * L + l);
  }
  return F;
}

// min c'f (or max tau when c is empty) over A f + s + tau 1 = b, s >= 0,
// solved by the conic solver with one 1 x 1 block per slack.
std::optional<Eigen::VectorXd> SolveLp(const Polytope& p,
                                       const Eigen::VectorXd* c,
                                       double* tau_out) {
  ConicProgram prog;
  const int nv = static_cast<int>(p.A.cols());
  for (int j = 0; j < nv; ++j) prog.AddFreeVariable();
  const int tau = c ? -1 : prog.AddFreeVariable("tau");
  for (int a = 0; a < p.A.rows(); ++a) {
    const int block = prog.AddPsdBlock(1);
    const int atom = prog.AddAtom(block, {{0, 0, 1.0}});
    const int row = prog.AddRow(p.b(a));
    prog.AddAtomCoefficient(row, atom, 1.0);
    for (int j = 0; j < nv; ++j) {
      if (p.A(a, j) != 0.0) prog.AddFreeCoefficient(row, j, p.A(a, j));
    }
    if (tau >= 0) prog.AddFreeCoefficient(row, tau, 1.0);
  }
  if (c) {
    for (int j = 0; j < nv; ++j) prog.AddObjectiveFree(j, (*c)(j));
  } else {
    prog.AddObjectiveFree(tau, -1.0);
  }
  SolverOptions o;
  o.phase_one = false;
  const ConicSolution sol = Solve(prog, o);
  if (sol.status != SolveStatus::kFeasible) return std::nullopt;
  if (tau_out && tau >= 0) *tau_out = sol.w(tau);
  return Eigen::VectorXd(sol.w.head(nv));
}

double MaxViolation(const Polytope& p, const Eigen::VectorXd& f) {
  return (p.A * f - p.b).maxCoeff();
}

// Moves v toward the interior point c until every constraint holds.
std::optional<Eigen::VectorXd> PullInside(const Polytope& p,
                                          const Eigen::VectorXd& c,
                                          const Eigen::VectorXd& v) {
  double shrink = 1e-9;
  for (int it = 0; it < 20; ++it, shrink *= 10) {
    const Eigen::VectorXd f = c + (1.0 - shrink) * (v - c);
    if (MaxViolation(p, f) <= 0.0) return f;
  }
  return std::nullopt;
}

double MaxEig(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(eig.eigenvalues().size() - 1);
}

double MinEig(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double ClippedBox(const Certificate& cert, double box) {
  return cert.region_radius > 0.0 ? std::min(box, cert.region_radius) : box;
}

}  // namespace

PlantSamples SampleConsistentPlants(const ConsistencySet& set, int count,
                                    std::uint64_t seed,
                                    const SamplerOptions& options) {
  if (count < 0) throw std::invalid_argument("negative sample count");
  const int n = set.n(), L = set.L();
  // Work in z = (f - f_ls) / scale, where f_ls fits the slab midlines in
  // the least-squares sense and scale = eps, so that the slabs have unit
  // width and the solver's absolute tolerances are relative to the noise.
  const Polytope raw = MakePolytope(set);
  Eigen::MatrixXd mid_rows(set.size() / 2, n * L);
  Eigen::VectorXd mid_rhs(set.size() / 2);
  for (int a = 0, r = 0; a < set.size(); a += 2, ++r) {
    mid_rows.row(r) = raw.A.row(a);
    mid_rhs(r) = raw.b(a) - set.eps();
  }
  const Eigen::VectorXd f_ls =
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(mid_rows).solve(mid_rhs);
  const double scale = set.eps() > 0.0 ? set.eps() : 1.0;
  Polytope p;
  p.A = raw.A;
  p.b = (raw.b - raw.A * f_ls) / scale;
  auto to_plant = [&](const Eigen::VectorXd& z) {
    return Unvec(f_ls + scale * z, n, L);
  };
  auto member = [&](const Eigen::VectorXd& z) {
    return MaxViolation(p, z) <= 0.0 &&
           CheckMembership(set, to_plant(z)).member;
  };

  double tau = 0.0;
  auto center = SolveLp(p, nullptr, &tau);
  if (!center || !(tau >= 0.0)) {
    throw EmptyConsistencySet("phase-I program found no consistent plant");
  }
  if (!member(*center)) {
    // Pull toward the least-squares point (z = 0) only if that is inside.
    const auto inside = PullInside(p, Eigen::VectorXd::Zero(n * L), *center);
    if (!inside || !member(*inside)) {
      throw EmptyConsistencySet("phase-I point violates the consistency set");
    }
    center = inside;
  }
  PlantSamples out;
  out.center = to_plant(*center);
  out.center_slack = tau * scale;
  if (count == 0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_direction = [&] {
    Eigen::VectorXd d(n * L);
    for (int j = 0; j < d.size(); ++j) d(j) = gauss(rng);
    return Eigen::VectorXd(d.normalized());
  };

  if (options.include_vertices) {
    for (int v = 0; v < 2 * n * L; ++v) {
      const Eigen::VectorXd c = random_direction();
      const auto opt = SolveLp(p, &c, nullptr);
      if (!opt) continue;
      const auto inside = PullInside(p, *center, *opt);
      if (!inside || !member(*inside)) continue;
      out.plants.push_back(to_plant(*inside));
      ++out.vertex_samples;
    }
  }

  // Hit-and-run: uniform point on the chord through f along a random
  // direction. Chords that are unbounded leave f unchanged.
  Eigen::VectorXd f = *center;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto step = [&] {
    const Eigen::VectorXd d = random_direction();
    const Eigen::VectorXd Ad = p.A * d;
    const Eigen::VectorXd slack = p.b - p.A * f;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int a = 0; a < Ad.size(); ++a) {
      if (Ad(a) > 0.0) hi = std::min(hi, slack(a) / Ad(a));
      if (Ad(a) < 0.0) lo = std::max(lo, slack(a) / Ad(a));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) return;
    const Eigen::VectorXd g = f + (lo + (hi - lo) * unit(rng)) * d;
    if (member(g)) f = g;
  };
  for (int s = 0; s < count; ++s) {
    for (int it = 0; it < options.burn_in; ++it) step();
    out.plants.push_back(to_plant(f));
    ++out.walk_samples;
  }
  return out;
}

std::vector<Eigen::VectorXd> BoxGrid(int n, double radius, int per_axis) {
  if (n < 1 || per_axis < 1) throw std::invalid_argument("empty grid");
  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(n, 0);
  auto coord = [&](int i) {
    return per_axis == 1 ? 0.0 : -radius + 2.0 * radius * i / (per_axis - 1);
  };
  while (true) {
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x(j) = coord(idx[j]);
    grid.push_back(x);
    int j = 0;
    while (j < n && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == n) break;
  }
  return grid;
}

Eigen::MatrixXd MetricDerivative(const Certificate& cert, const Eigen::MatrixXd& F,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd f = F * cert.dict.Evaluate(x);
  Eigen::MatrixXd Wdot = Eigen::MatrixXd::Zero(cert.n, cert.n);
  for (int j = 0; j < cert.n; ++j) {
    if (f(j) != 0.0) Wdot += cert.W.Differentiate(j).Evaluate(x) * f(j);
  }
  return Wdot;
}

Eigen::MatrixXd ContractionMatrix(const Certificate& cert, const Eigen::MatrixXd& F,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::MatrixXd A = F * Jacobian(cert.dict).Evaluate(x);
  const Eigen::MatrixXd W = cert.W.Evaluate(x);
  Eigen::MatrixXd S = -MetricDerivative(cert, F, x) + W * A.transpose() + A * W +
                      2.0 * cert.lambda * W;
  if (cert.G.cols() > 0) {
    S -= cert.rho.Evaluate(x) * cert.G * cert.G.transpose();
  }
  return S;
}

ContractionReport CheckContraction(const Certificate& cert, const Eigen::MatrixXd& F,
                                   const std::vector<Eigen::VectorXd>& grid) {
  if (grid.empty()) throw std::invalid_argument("empty grid");
  ContractionReport r;
  const PolyMatrix jac = Jacobian(cert.dict);
  for (const auto& x : grid) {
    const Eigen::MatrixXd S = ContractionMatrix(cert, F, x);
    const double e = MaxEig(S);
    // Metric form with M = W^{-1}: J'M + MJ + Mdot + 2 lambda M, where
    // Mdot = -M Wdot M and J = A + G K.
    const Eigen::MatrixXd W = cert.W.Evaluate(x);
    const Eigen::MatrixXd M = W.inverse();
    Eigen::MatrixXd J = F * jac.Evaluate(x);
    if (cert.G.cols() > 0) J += cert.G * DifferentialGain(cert, x);
    const Eigen::MatrixXd Mdot = -M * MetricDerivative(cert, F, x) * M;
    const double em =
        MaxEig(J.transpose() * M + M * J + Mdot + 2.0 * cert.lambda * M);
    if ((e < 0.0) != (em < 0.0)) r.forms_agree = false;
    if (e > r.max_eig) {
      r.max_eig = e;
      r.worst_x = x;
    }
    r.max_eig_metric_form = std::max(r.max_eig_metric_form, em);
    ++r.points;
  }
  r.pass = r.max_eig < 0.0;
  return r;
}

DualConditionReport CheckDualConditions(const Certificate& cert,
                                        const ConsistencySet& set,
                                        std::uint64_t seed, int points,
                                        double box) {
  const int n = cert.n, L = set.L(), T = set.T();
  if (set.n() != n || static_cast<int>(cert.multipliers.size()) != set.size()) {
    throw std::invalid_argument("certificate does not match the data");
  }
  DualConditionReport r;
  const double radius = ClippedBox(cert, box);
  const PolyMatrix jac = Jacobian(cert.dict);
  std::vector<PolyMatrix> dW;
  for (int j = 0; j < n; ++j) dW.push_back(cert.W.Differentiate(j));
  for (int c = 0; c < cert.G.cols(); ++c) {
    PolyMatrix e(n, n, n, true);
    for (int j = 0; j < n; ++j) {
      if (cert.G(j, c) != 0.0) e = e + dW[j] * cert.G(j, c);
    }
    r.max_orthogonal_coefficient =
        std::max(r.max_orthogonal_coefficient, e.MaxAbsCoefficient());
  }
  r.metric_bound = cert.t;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::normal_distribution<double> gauss;
  const Eigen::MatrixXd GGt = cert.G * cert.G.transpose();
  const Eigen::MatrixXd& phi = set.phi_values();
  for (int p = 0; p < points; ++p) {
    Eigen::VectorXd x(n), y(n);
    for (int j = 0; j < n; ++j) x(j) = u(rng);
    for (int j = 0; j < n; ++j) y(j) = gauss(rng);
    y.normalize();
    const Eigen::MatrixXd W = cert.W.Evaluate(x);
    const Eigen::MatrixXd J = jac.Evaluate(x);
    const Eigen::VectorXd phix = cert.dict.Evaluate(x);
    std::vector<double> mu(set.size());
    double dmu = 0.0;
    for (int a = 0; a < set.size(); ++a) {
      mu[a] = cert.Mu(a, x, y);
      r.min_mu = std::min(r.min_mu, mu[a]);
      dmu += set.d(a) * mu[a];
    }
    double pos = y.dot(W * y) * (-2.0 * cert.lambda) - dmu;
    if (cert.G.cols() > 0) pos += cert.rho.Evaluate(x) * y.dot(GGt * y);
    r.min_positivity = std::min(r.min_positivity, pos);
    // Zero-constraint vector: for every (l, k),
    // 2 y_k (dphi_l' W y) - phi_l(x) y' dW/dx_k y - sum_i (mu+ - mu-)_{ik} phi_l(x_i).
    const Eigen::VectorXd Wy = W * y;
    for (int k = 0; k < n; ++k) {
      const double ydWy = y.dot(dW[k].Evaluate(x) * y);
      for (int l = 0; l < L; ++l) {
        double v = 2.0 * y(k) * J.row(l).dot(Wy) - phix(l) * ydWy;
        for (int i = 0; i < T; ++i) {
          v -= (mu[ConsistencySet::Index(n, i, k, 1)] -
                mu[ConsistencySet::Index(n, i, k, -1)]) *
               phi(l, i);
        }
        r.max_zero_residual = std::max(r.max_zero_residual, std::abs(v));
      }
    }
    r.min_metric_eig = std::min(r.min_metric_eig, MinEig(W));
    ++r.points;
  }
  r.positivity_pass = r.min_positivity > 0.0;
  r.zero_pass = r.max_zero_residual <= 1e-6;
  r.orthogonal_pass = r.max_orthogonal_coefficient <= 1e-8;
  r.mu_pass = r.min_mu >= -1e-9;
  r.metric_pass = r.min_metric_eig > 0.0 &&
                  r.min_metric_eig >= r.metric_bound * (1.0 - 1e-6) - 1e-12;
  r.pass = r.positivity_pass && r.zero_pass && r.orthogonal_pass && r.mu_pass &&
           r.metric_pass;
  return r;
}

double RiemannDistance(const Certificate& cert,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       const GeodesicOptions& options) {
  const GeodesicPath g = Geodesic(CertificateMetric(cert), x, options);
  return std::sqrt(std::max(0.0, g.energy));
}

double MetricDerivativeFdError(const Certificate& cert, const Eigen::MatrixXd& F,
                               const Trajectory& traj) {
  double worst = 0.0;
  for (size_t k = 1; k + 1 < traj.t.size(); ++k) {
    const double dt = traj.t[k + 1] - traj.t[k - 1];
    const Eigen::MatrixXd fd =
        (cert.W.Evaluate(traj.x[k + 1]) - cert.W.Evaluate(traj.x[k - 1])) / dt;
    const Eigen::MatrixXd W = cert.W.Evaluate(traj.x[k]);
    const double err = (MetricDerivative(cert, F, traj.x[k]) - fd).cwiseAbs().maxCoeff();
    worst = std::max(worst, err / (1.0 + W.cwiseAbs().maxCoeff()));
  }
  return worst;
}

VerificationReport Verify(const Certificate& cert, const ConsistencySet& set,
                          const VerifyOptions& o) {
  VerificationReport r;
  r.seed = o.seed;
  r.box = ClippedBox(cert, o.box);
  const auto grid = BoxGrid(cert.n, r.box, o.grid_per_axis);
  r.grid_points = static_cast<int>(grid.size());

  auto check = [&](const Eigen::MatrixXd& F) {
    const ContractionReport c = CheckContraction(cert, F, grid);
    r.worst_contraction_eig = std::max(r.worst_contraction_eig, c.max_eig);
    r.worst_metric_form_eig = std::max(r.worst_metric_form_eig, c.max_eig_metric_form);
    r.forms_agree = r.forms_agree && c.forms_agree;
    ++r.plants_checked;
    if (!c.pass) ++r.failing_plants;
    return c;
  };
  if (o.F_true) {
    const ContractionReport c = check(*o.F_true);
    r.true_plant_checked = true;
    r.true_plant_pass = c.pass;
    r.true_plant_max_eig = c.max_eig;
  }
  try {
    const PlantSamples s = SampleConsistentPlants(set, o.plant_samples, o.seed);
    r.sampler_ok = true;
    r.vertex_samples = s.vertex_samples;
    r.walk_samples = s.walk_samples;
    for (const auto& F : s.plants) check(F);
  } catch (const EmptyConsistencySet& e) {
    r.sampler_error = e.what();
  }
  r.contraction_pass = r.plants_checked > 0 && r.failing_plants == 0 &&
                       r.forms_agree && (!o.F_true || r.true_plant_pass);
  r.dual = CheckDualConditions(cert, set, o.seed, o.dual_points, o.box);
  r.pass = r.sampler_ok && r.contraction_pass && r.dual.pass;
  return r;
}

std::string ReportToJson(const VerificationReport& r) {
  const DualConditionReport& d = r.dual;
  Json j{{"format", "ddccm-verification"},
         {"version", 1},
         {"pass", r.pass},
         {"seed", r.seed},
         {"box", r.box},
         {"grid_points", r.grid_points},
         {"sampler", Json{{"ok", r.sampler_ok},
                          {"error", r.sampler_error},
                          {"vertex_samples", r.vertex_samples},
                          {"walk_samples", r.walk_samples}}},
         {"contraction",
          Json{{"pass", r.contraction_pass},
               {"plants_checked", r.plants_checked},
               {"failing_plants", r.failing_plants},
               {"worst_max_eig", r.worst_contraction_eig},
               {"worst_metric_form_eig", r.worst_metric_form_eig},
               {"forms_agree", r.forms_agree},
               {"true_plant_checked", r.true_plant_checked},
               {"true_plant_pass", r.true_plant_pass},
               {"true_plant_max_eig", r.true_plant_max_eig}}},
         {"dual_conditions",
          Json{{"pass", d.pass},
               {"points", d.points},
               {"min_positivity", d.min_positivity},
               {"positivity_pass", d.positivity_pass},
               {"max_zero_residual", d.max_zero_residual},
               {"zero_pass", d.zero_pass},
               {"max_orthogonal_coefficient", d.max_orthogonal_coefficient},
               {"orthogonal_pass", d.orthogonal_pass},
               {"min_mu", d.min_mu},
               {"mu_pass", d.mu_pass},
               {"min_metric_eig", d.min_metric_eig},
               {"metric_bound", d.metric_bound},
               {"metric_pass", d.metric_pass}}}};
  return j.dump(1);
}

std::string ReportToText(const VerificationReport& r) {
  const DualConditionReport& d = r.dual;
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::ostringstream os;
  os << "verification: " << verdict(r.pass) << " (seed " << r.seed << ")\n";
  os << "  grid: " << r.grid_points << " points on [-" << r.box << ", " << r.box
     << "]^n\n";
  os << "  sampler: " << (r.sampler_ok ? "ok" : r.sampler_error) << ", "
     << r.vertex_samples << " vertex + " << r.walk_samples << " hit-and-run\n";
  os << "  contraction LMI: " << verdict(r.contraction_pass) << ", "
     << r.plants_checked << " plants, " << r.failing_plants
     << " failing, worst max eigenvalue " << r.worst_contraction_eig
     << ", metric form " << r.worst_metric_form_eig
     << (r.forms_agree ? "" : " (forms disagree)") << "\n";
  if (r.true_plant_checked) {
    os << "  true plant: " << verdict(r.true_plant_pass) << ", max eigenvalue "
       << r.true_plant_max_eig << "\n";
  }
  os << "  dual conditions at " << d.points << " points: " << verdict(d.pass)
     << "\n";
  os << "    positivity min " << d.min_positivity << " "
     << verdict(d.positivity_pass) << "\n";
  os << "    zero-constraint residual " << d.max_zero_residual << " "
     << verdict(d.zero_pass) << "\n";
  os << "    G-orthogonality coefficient " << d.max_orthogonal_coefficient << " "
     << verdict(d.orthogonal_pass) << "\n";
  os << "    min mu " << d.min_mu << " " << verdict(d.mu_pass) << "\n";
  os << "    min eig W " << d.min_metric_eig << " (bound " << d.metric_bound
     << ") " << verdict(d.metric_pass) << "\n";
  return os.str();
}

}  // namespace ddccm
