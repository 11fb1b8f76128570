#include "ddccm/sdp/solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace ddccm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FullEntry {
  int i;
  int j;
  double v;
};

// Program data after merging duplicate coefficients and scaling rows to unit
// norm. Row r of the scaled program is scale(r) times row r of the original.
struct Compiled {
  int m{0};
  int nf{0};
  std::vector<int> dims;
  std::vector<std::vector<int>> block_atoms;
  std::vector<std::vector<FullEntry>> atom_full;
  std::vector<std::vector<std::pair<int, double>>> atom_rows;
  std::vector<int> atom_block;
  Eigen::VectorXd b;
  Eigen::VectorXd scale;
  Eigen::MatrixXd G;
  Eigen::VectorXd cw;
  std::vector<Eigen::MatrixXd> C;
  std::vector<bool> empty_row;
  int total_dim{0};
};

std::vector<FullEntry> Expand(const SymSparse& A) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& e : A) {
    acc[{e.i, e.j}] += e.value;
    if (e.i != e.j) acc[{e.j, e.i}] += e.value;
  }
  std::vector<FullEntry> out;
  for (const auto& [ij, v] : acc) {
    if (v != 0.0) out.push_back({ij.first, ij.second, v});
  }
  return out;
}

Compiled Compile(const ConicProgram& p) {
  Compiled c;
  c.m = p.num_rows();
  c.nf = p.num_free();
  c.dims.resize(p.num_blocks());
  c.block_atoms.resize(p.num_blocks());
  for (int b = 0; b < p.num_blocks(); ++b) {
    c.dims[b] = p.block_dim(b);
    c.total_dim += c.dims[b];
  }
  c.atom_full.resize(p.num_atoms());
  c.atom_rows.resize(p.num_atoms());
  c.atom_block.resize(p.num_atoms());
  std::vector<double> atom_norm2(p.num_atoms());
  for (int a = 0; a < p.num_atoms(); ++a) {
    c.atom_full[a] = Expand(p.atom(a));
    c.atom_block[a] = p.atom_block(a);
    c.block_atoms[p.atom_block(a)].push_back(a);
    double n2 = 0.0;
    for (const auto& e : c.atom_full[a]) n2 += e.v * e.v;
    atom_norm2[a] = n2;
  }
  c.G = Eigen::MatrixXd::Zero(c.m, c.nf);
  std::vector<std::map<int, double>> rows_of_atom(p.num_atoms());
  Eigen::VectorXd norm2 = Eigen::VectorXd::Zero(c.m);
  for (int r = 0; r < c.m; ++r) {
    std::map<int, double> merged;
    for (const auto& [a, v] : p.row_atoms(r)) merged[a] += v;
    for (const auto& [a, v] : merged) {
      if (v == 0.0) continue;
      rows_of_atom[a][r] = v;
      norm2(r) += v * v * atom_norm2[a];
    }
    for (const auto& [f, v] : p.row_free(r)) c.G(r, f) += v;
    norm2(r) += c.G.row(r).squaredNorm();
  }
  c.scale.resize(c.m);
  c.empty_row.assign(c.m, false);
  for (int r = 0; r < c.m; ++r) {
    if (norm2(r) == 0.0) {
      c.empty_row[r] = true;
      c.scale(r) = 1.0;
    } else {
      c.scale(r) = 1.0 / std::sqrt(norm2(r));
    }
  }
  for (int a = 0; a < p.num_atoms(); ++a) {
    for (const auto& [r, v] : rows_of_atom[a]) {
      c.atom_rows[a].emplace_back(r, v * c.scale(r));
    }
  }
  c.b = p.rhs_vector().cwiseProduct(c.scale);
  c.G = c.scale.asDiagonal() * c.G;
  c.cw = Eigen::VectorXd::Zero(c.nf);
  for (const auto& [f, v] : p.objective_free()) c.cw(f) += v;
  c.C.resize(p.num_blocks());
  for (int b = 0; b < p.num_blocks(); ++b) {
    c.C[b] = Eigen::MatrixXd::Zero(c.dims[b], c.dims[b]);
  }
  for (const auto& [a, v] : p.objective_atoms()) {
    for (const auto& e : c.atom_full[a]) c.C[c.atom_block[a]](e.i, e.j) += v * e.v;
  }
  return c;
}

double AtomValue(const std::vector<FullEntry>& full, const Eigen::MatrixXd& X) {
  double s = 0.0;
  for (const auto& e : full) s += e.v * X(e.i, e.j);
  return s;
}

Eigen::VectorXd ApplyA(const Compiled& c, const std::vector<Eigen::MatrixXd>& X) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(c.m);
  for (size_t a = 0; a < c.atom_full.size(); ++a) {
    if (c.atom_rows[a].empty()) continue;
    const double v = AtomValue(c.atom_full[a], X[c.atom_block[a]]);
    for (const auto& [r, coef] : c.atom_rows[a]) out(r) += coef * v;
  }
  return out;
}

std::vector<Eigen::MatrixXd> ApplyAdjoint(const Compiled& c,
                                          const Eigen::VectorXd& y) {
  std::vector<Eigen::MatrixXd> out(c.dims.size());
  for (size_t b = 0; b < c.dims.size(); ++b) {
    out[b] = Eigen::MatrixXd::Zero(c.dims[b], c.dims[b]);
  }
  for (size_t a = 0; a < c.atom_full.size(); ++a) {
    double wgt = 0.0;
    for (const auto& [r, coef] : c.atom_rows[a]) wgt += coef * y(r);
    if (wgt == 0.0) continue;
    Eigen::MatrixXd& M = out[c.atom_block[a]];
    for (const auto& e : c.atom_full[a]) M(e.i, e.j) += wgt * e.v;
  }
  return out;
}

double Dot(const std::vector<Eigen::MatrixXd>& A,
           const std::vector<Eigen::MatrixXd>& B) {
  double s = 0.0;
  for (size_t b = 0; b < A.size(); ++b) s += A[b].cwiseProduct(B[b]).sum();
  return s;
}

double FrobNorm(const std::vector<Eigen::MatrixXd>& A) {
  return std::sqrt(Dot(A, A));
}

// Largest alpha with X + alpha dX PSD (kInf if unbounded).
double MaxStep(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dX) {
  if (X.rows() == 1) return dX(0, 0) < 0 ? -X(0, 0) / dX(0, 0) : kInf;
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd M = llt.matrixL().solve(dX);
  M = llt.matrixL().solve(M.transpose()).transpose();
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0 ? -1.0 / lmin : kInf;
}

double MaxStep(const std::vector<Eigen::MatrixXd>& X,
               const std::vector<Eigen::MatrixXd>& dX) {
  double a = kInf;
  for (size_t b = 0; b < X.size(); ++b) a = std::min(a, MaxStep(X[b], dX[b]));
  return a;
}

Eigen::MatrixXd InverseSpd(const Eigen::MatrixXd& Z) {
  Eigen::LLT<Eigen::MatrixXd> llt(Z);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(Z.rows(), Z.cols());
  Eigen::MatrixXd inv = llt.solve(I);
  return 0.5 * (inv + inv.transpose());
}

// Schur complement B(r, s) = <A_r, X A_s Z^-1>, assembled per block in atom
// coordinates: K(a, a') = <A_a, X A_a' Z^-1>, then B += P K P'.
void AddSchurBlock(const Compiled& c, int block, const Eigen::MatrixXd& X,
                   const Eigen::MatrixXd& Zi, Eigen::MatrixXd* B) {
  const auto& atoms = c.block_atoms[block];
  const int k = static_cast<int>(atoms.size());
  std::vector<int> active;
  for (int a : atoms) {
    if (!c.atom_rows[a].empty()) active.push_back(a);
  }
  const int ka = static_cast<int>(active.size());
  if (ka == 0 || k == 0) return;
  Eigen::MatrixXd K(ka, ka);
  for (int s = 0; s < ka; ++s) {
    const auto& fs = c.atom_full[active[s]];
    for (int r = 0; r <= s; ++r) {
      const auto& fr = c.atom_full[active[r]];
      double acc = 0.0;
      // sum_{(i,j) in A_r, (p,q) in A_s} A_r(i,j) X(j,p) A_s(p,q) Zi(q,i)
      for (const auto& e : fr) {
        double inner = 0.0;
        for (const auto& f : fs) inner += f.v * X(e.j, f.i) * Zi(f.j, e.i);
        acc += e.v * inner;
      }
      K(r, s) = acc;
      K(s, r) = acc;
    }
  }
  for (int s = 0; s < ka; ++s) {
    const auto& rs = c.atom_rows[active[s]];
    for (int r = 0; r < ka; ++r) {
      const double kv = K(r, s);
      if (kv == 0.0) continue;
      const auto& rr = c.atom_rows[active[r]];
      for (const auto& [row2, c2] : rs) {
        double* col = B->col(row2).data();
        const double f = kv * c2;
        for (const auto& [row1, c1] : rr) col[row1] += f * c1;
      }
    }
  }
}

// Solves [B G; G' 0][dy; dw] = [rhs; rg] given factorizations.
struct SaddleSolver {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd BinvG;
  Eigen::MatrixXd schur_pinv;
  bool has_free{false};
  double regularization{0.0};
  double gamma{0.0};

  // With free variables B may be singular; the saddle system is solved with
  // B + gamma G G' instead, which is positive definite whenever the saddle
  // matrix is nonsingular, and dw is shifted back by gamma * rg.
  bool Factor(Eigen::MatrixXd* B, const Eigen::MatrixXd& G) {
    has_free = G.cols() > 0;
    gamma = 0.0;
    if (has_free) {
      const double gg = (G * G.transpose()).diagonal().maxCoeff();
      if (gg > 0.0) {
        gamma = std::max(1.0, B->diagonal().cwiseAbs().maxCoeff()) / gg;
        B->noalias() += gamma * G * G.transpose();
      }
    }
    const double maxdiag = std::max(1.0, B->diagonal().cwiseAbs().maxCoeff());
    regularization = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      llt.compute(*B);
      if (llt.info() == Eigen::Success) break;
      const double reg = maxdiag * std::pow(10.0, -14 + 2 * attempt);
      B->diagonal().array() += reg - regularization;
      regularization = reg;
    }
    if (llt.info() != Eigen::Success) return false;
    if (has_free) {
      BinvG = llt.solve(G);
      Eigen::MatrixXd S = G.transpose() * BinvG;
      S = 0.5 * (S + S.transpose());
      // Pseudo-inverse: free variables outside range(G') get zero steps.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      const Eigen::VectorXd ev = es.eigenvalues();
      const double cut = 1e-12 * std::max(1e-300, ev.cwiseAbs().maxCoeff());
      Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
      for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut) inv(i) = 1.0 / ev(i);
      }
      schur_pinv = es.eigenvectors() * inv.asDiagonal() *
                   es.eigenvectors().transpose();
    }
    return true;
  }

  void SolveOnce(const Eigen::VectorXd& rhs, const Eigen::VectorXd& rg,
                 Eigen::VectorXd* dy, Eigen::VectorXd* dw) const {
    Eigen::VectorXd t = llt.solve(rhs);
    if (has_free) {
      // G' B^-1 (rhs - G dw) = rg
      *dw = schur_pinv * (BinvG.transpose() * rhs - rg);
      *dy = t - BinvG * *dw;
      *dw += gamma * rg;
    } else {
      *dw = Eigen::VectorXd::Zero(0);
      *dy = t;
    }
  }

  // Two rounds of iterative refinement against the unregularized system.
  void Solve(const Eigen::MatrixXd& B, const Eigen::MatrixXd& G,
             const Eigen::VectorXd& rhs, const Eigen::VectorXd& rg,
             Eigen::VectorXd* dy, Eigen::VectorXd* dw) const {
    SolveOnce(rhs, rg, dy, dw);
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd e1 = rhs - B.selfadjointView<Eigen::Lower>() * *dy;
      if (has_free) e1 -= G * *dw;
      const Eigen::VectorXd e2 =
          has_free ? Eigen::VectorXd(rg - G.transpose() * *dy) : rg;
      Eigen::VectorXd cy, cw;
      SolveOnce(e1, e2, &cy, &cw);
      *dy += cy;
      if (has_free) *dw += cw;
    }
  }
};

enum class IpmOutcome { kConverged, kMaxIterations, kDiverged, kStalled,
                        kFactorization, kEmptyRow };

struct IpmResult {
  IpmOutcome outcome{IpmOutcome::kMaxIterations};
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  Eigen::VectorXd w;
  Eigen::VectorXd y;  // in original row scaling
  int iterations{0};
};

IpmResult RunIpm(const ConicProgram& program, const SolverOptions& opt) {
  const Compiled c = Compile(program);
  IpmResult res;
  const int nb = static_cast<int>(c.dims.size());
  for (int r = 0; r < c.m; ++r) {
    if (c.empty_row[r] && program.rhs(r) != 0.0) {
      res.outcome = IpmOutcome::kEmptyRow;
      return res;
    }
  }
  // Initial point, scaled after SDPT3's default.
  std::vector<Eigen::MatrixXd> X(nb), Z(nb);
  for (int b = 0; b < nb; ++b) {
    const int n = c.dims[b];
    double max_ratio = 0.0, max_anorm = 0.0;
    std::vector<double> row_norm2(c.m, 0.0);
    for (int a : c.block_atoms[b]) {
      double n2 = 0.0;
      for (const auto& e : c.atom_full[a]) n2 += e.v * e.v;
      for (const auto& [r, v] : c.atom_rows[a]) row_norm2[r] += v * v * n2;
    }
    for (int r = 0; r < c.m; ++r) {
      if (row_norm2[r] == 0.0) continue;
      const double an = std::sqrt(row_norm2[r]);
      max_ratio = std::max(max_ratio, (1 + std::abs(c.b(r))) / (1 + an));
      max_anorm = std::max(max_anorm, an);
    }
    const double xi = std::max({10.0, std::sqrt(n), n * max_ratio});
    const double eta = std::max({10.0, std::sqrt(n), max_anorm, c.C[b].norm()});
    X[b] = xi * Eigen::MatrixXd::Identity(n, n);
    Z[b] = eta * Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(c.m);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(c.nf);
  const double total = std::max(1, c.total_dim);
  const double normC = FrobNorm(c.C);
  const double normcw = c.nf ? c.cw.cwiseAbs().maxCoeff() : 0.0;
  int stall = 0;

  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    res.iterations = iter;
    const Eigen::VectorXd rp = c.b - ApplyA(c, X) - c.G * w;
    std::vector<Eigen::MatrixXd> Rd = ApplyAdjoint(c, y);
    for (int b = 0; b < nb; ++b) Rd[b] = c.C[b] - Rd[b] - Z[b];
    const Eigen::VectorXd rg = c.cw - c.G.transpose() * y;
    const double mu = Dot(X, Z) / total;
    const double pobj = Dot(c.C, X) + c.cw.dot(w);
    const double dobj = c.b.dot(y);
    const double pinf = rp.cwiseQuotient(c.scale).lpNorm<Eigen::Infinity>();
    double dinf = FrobNorm(Rd) / (1 + normC);
    if (c.nf) dinf = std::max(dinf, rg.lpNorm<Eigen::Infinity>() / (1 + normcw));
    const double gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    if (opt.verbose) {
      std::printf("%3d pobj %+.6e dobj %+.6e pinf %.2e dinf %.2e gap %.2e mu %.2e\n",
                  iter, pobj, dobj, pinf, dinf, gap, mu);
    }
    if (pinf <= opt.feasibility_tol && dinf <= opt.feasibility_tol &&
        gap <= opt.gap_tol) {
      res.outcome = IpmOutcome::kConverged;
      break;
    }
    if (iter == opt.max_iterations) {
      res.outcome = IpmOutcome::kMaxIterations;
      break;
    }
    double xmax = 0.0;
    for (const auto& Xb : X) xmax = std::max(xmax, Xb.cwiseAbs().maxCoeff());
    if (xmax > 1e12 || y.lpNorm<Eigen::Infinity>() > 1e12 ||
        !std::isfinite(mu)) {
      res.outcome = IpmOutcome::kDiverged;
      break;
    }

    std::vector<Eigen::MatrixXd> Zi(nb);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(c.m, c.m);
    for (int b = 0; b < nb; ++b) {
      Zi[b] = InverseSpd(Z[b]);
      AddSchurBlock(c, b, X[b], Zi[b], &B);
    }
    for (int r = 0; r < c.m; ++r) {
      if (c.empty_row[r]) B(r, r) = 1.0;
    }
    SaddleSolver saddle;
    const Eigen::MatrixXd B0 = B;
    if (!saddle.Factor(&B, c.G)) {
      res.outcome = IpmOutcome::kFactorization;
      break;
    }

    // Direction for K = target - X - X Rd Z^-1 (+ corrector terms).
    auto direction = [&](const std::vector<Eigen::MatrixXd>& K,
                         std::vector<Eigen::MatrixXd>* dX,
                         std::vector<Eigen::MatrixXd>* dZ, Eigen::VectorXd* dy,
                         Eigen::VectorXd* dw) {
      const Eigen::VectorXd rhs = rp - ApplyA(c, K);
      saddle.Solve(B0, c.G, rhs, rg, dy, dw);
      std::vector<Eigen::MatrixXd> Ady = ApplyAdjoint(c, *dy);
      dX->resize(nb);
      dZ->resize(nb);
      for (int b = 0; b < nb; ++b) {
        (*dZ)[b] = Rd[b] - Ady[b];
        Eigen::MatrixXd D = K[b] + X[b] * Ady[b] * Zi[b];
        (*dX)[b] = 0.5 * (D + D.transpose());
      }
    };

    std::vector<Eigen::MatrixXd> K(nb), XRdZi(nb);
    for (int b = 0; b < nb; ++b) {
      XRdZi[b] = X[b] * Rd[b] * Zi[b];
      K[b] = -X[b] - XRdZi[b];
    }
    std::vector<Eigen::MatrixXd> dXp, dZp;
    Eigen::VectorXd dyp, dwp;
    direction(K, &dXp, &dZp, &dyp, &dwp);
    const double ap = std::min(1.0, MaxStep(X, dXp));
    const double ad = std::min(1.0, MaxStep(Z, dZp));
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      mu_aff += (X[b] + ap * dXp[b]).cwiseProduct(Z[b] + ad * dZp[b]).sum();
    }
    mu_aff /= total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0),
                                    0.0, 1.0);

    for (int b = 0; b < nb; ++b) {
      K[b] = sigma * mu * Zi[b] - X[b] - XRdZi[b] - dXp[b] * dZp[b] * Zi[b];
    }
    std::vector<Eigen::MatrixXd> dX, dZ;
    Eigen::VectorXd dy, dw;
    direction(K, &dX, &dZ, &dy, &dw);
    const double alpha = std::min(1.0, opt.step_fraction * MaxStep(X, dX));
    const double beta = std::min(1.0, opt.step_fraction * MaxStep(Z, dZ));
    if (opt.verbose) {
      std::printf("    alpha %.3e beta %.3e sigma %.3e\n", alpha, beta, sigma);
    }
    if (alpha < 1e-10 && beta < 1e-10) {
      if (++stall >= 3) {
        res.outcome = IpmOutcome::kStalled;
        break;
      }
    } else {
      stall = 0;
    }
    for (int b = 0; b < nb; ++b) {
      X[b] += alpha * dX[b];
      Z[b] += beta * dZ[b];
    }
    w += alpha * dw;
    y += beta * dy;
  }
  res.X = std::move(X);
  res.Z = std::move(Z);
  res.w = std::move(w);
  res.y = y.cwiseProduct(c.scale);
  return res;
}

std::string Describe(IpmOutcome o) {
  switch (o) {
    case IpmOutcome::kConverged: return "converged";
    case IpmOutcome::kMaxIterations: return "iteration limit";
    case IpmOutcome::kDiverged: return "iterates diverged";
    case IpmOutcome::kStalled: return "step length stalled";
    case IpmOutcome::kFactorization: return "Schur complement factorization failed";
    case IpmOutcome::kEmptyRow: return "empty row with nonzero right-hand side";
  }
  return "";
}

// Repairs an approximate certificate: projects y onto null(G') and picks the
// largest y_M <= 0 with -A*(y) - y_M I PSD.
FarkasCertificate CleanCertificate(const ConicProgram& p, Eigen::VectorXd y,
                                   double radius) {
  if (p.num_free() > 0) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p.num_rows(), p.num_free());
    for (int r = 0; r < p.num_rows(); ++r) {
      for (const auto& [f, v] : p.row_free(r)) G(r, f) += v;
    }
    const auto qr = G.colPivHouseholderQr();
    const Eigen::MatrixXd Q = qr.householderQ() *
        Eigen::MatrixXd::Identity(G.rows(), qr.rank());
    y -= Q * (Q.transpose() * y);
  }
  double lmin = kInf;
  for (int b = 0; b < p.num_blocks(); ++b) {
    const Eigen::MatrixXd M = -p.Adjoint(b, y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues()(0));
  }
  FarkasCertificate cert;
  cert.radius = radius;
  // The best y_M for this y is min(0, lmin); keep a tiny cushion so that
  // eigenvalue rounding cannot flip the sign.
  cert.y_radius = lmin >= 0.0 ? 0.0 : lmin - 1e-12 * (1 + std::abs(lmin));
  cert.y = std::move(y);
  cert.value = p.rhs_vector().dot(cert.y) + radius * cert.y_radius;
  if (cert.value > 0.0) {
    // Normalize so that b'y + M y_M = 1.
    cert.y /= cert.value;
    cert.y_radius /= cert.value;
    cert.value = 1.0;
  }
  cert.global = cert.y_radius == 0.0;
  return cert;
}

// Same blocks, atoms, free variables and rows; no objective.
ConicProgram WithoutObjective(const ConicProgram& p) {
  ConicProgram out;
  for (int b = 0; b < p.num_blocks(); ++b) {
    out.AddPsdBlock(p.block_dim(b), p.block_name(b));
  }
  for (int a = 0; a < p.num_atoms(); ++a) out.AddAtom(p.atom_block(a), p.atom(a));
  for (int f = 0; f < p.num_free(); ++f) out.AddFreeVariable(p.free_name(f));
  for (int r = 0; r < p.num_rows(); ++r) {
    out.AddRow(p.rhs(r));
    for (const auto& [a, v] : p.row_atoms(r)) out.AddAtomCoefficient(r, a, v);
    for (const auto& [f, v] : p.row_free(r)) out.AddFreeCoefficient(r, f, v);
  }
  return out;
}

}  // namespace

std::string ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasibleCertified: return "infeasible-certified";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "";
}

double MinEigenvalue(const std::vector<Eigen::MatrixXd>& blocks) {
  double lmin = kInf;
  for (const auto& M : blocks) {
    if (M.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues()(0));
  }
  return lmin;
}

SolveResiduals ComputeResiduals(const ConicProgram& p,
                                const ConicSolution& s) {
  SolveResiduals r;
  const Eigen::VectorXd w =
      s.w.size() == p.num_free() ? s.w : Eigen::VectorXd::Zero(p.num_free());
  r.primal_linf =
      (p.rhs_vector() - p.EvaluateRows(s.X, w)).lpNorm<Eigen::Infinity>();
  if (p.num_rows() == 0) r.primal_linf = 0.0;
  r.min_eig_X = MinEigenvalue(s.X);
  r.primal_objective = p.EvaluateObjective(s.X, w);
  if (s.y.size() == p.num_rows() &&
      static_cast<int>(s.Z.size()) == p.num_blocks()) {
    double num = 0.0, den = 0.0;
    for (int b = 0; b < p.num_blocks(); ++b) {
      const Eigen::MatrixXd C = p.ObjectiveMatrix(b);
      num += (C - p.Adjoint(b, s.y) - s.Z[b]).squaredNorm();
      den += C.squaredNorm();
    }
    r.dual_rel = std::sqrt(num) / (1 + std::sqrt(den));
    Eigen::VectorXd cw = Eigen::VectorXd::Zero(p.num_free());
    for (const auto& [f, v] : p.objective_free()) cw(f) += v;
    if (p.num_free() > 0) {
      r.dual_rel = std::max(
          r.dual_rel, (cw - p.AdjointFree(s.y)).lpNorm<Eigen::Infinity>() /
                          (1 + cw.lpNorm<Eigen::Infinity>()));
    }
    r.min_eig_Z = MinEigenvalue(s.Z);
    r.dual_objective = p.rhs_vector().dot(s.y);
    r.gap = std::abs(r.primal_objective - r.dual_objective) /
            (1 + std::abs(r.primal_objective) + std::abs(r.dual_objective));
  } else {
    r.dual_rel = std::numeric_limits<double>::quiet_NaN();
    r.min_eig_Z = std::numeric_limits<double>::quiet_NaN();
    r.dual_objective = std::numeric_limits<double>::quiet_NaN();
    r.gap = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

double FarkasViolation(const ConicProgram& p, const FarkasCertificate& cert,
                       std::string* why) {
  double worst = -kInf;
  std::string reason;
  auto note = [&](double v, const char* what) {
    if (v > worst) {
      worst = v;
      reason = what;
    }
  };
  for (int b = 0; b < p.num_blocks(); ++b) {
    Eigen::MatrixXd M = -p.Adjoint(b, cert.y);
    M.diagonal().array() -= cert.y_radius;
    note(-MinEigenvalue({M}), "-A*(y) - y_M I not PSD");
  }
  if (p.num_free() > 0) {
    note(p.AdjointFree(cert.y).lpNorm<Eigen::Infinity>(), "G'y != 0");
  }
  note(cert.y_radius, "y_M > 0");
  note(-(p.rhs_vector().dot(cert.y) + cert.radius * cert.y_radius),
       "b'y + M y_M <= 0");
  if (why) *why = reason;
  return worst;
}

ConicSolution Solve(const ConicProgram& program, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ConicSolution sol;
  const IpmResult direct = RunIpm(program, options);
  sol.iterations = direct.iterations;
  if (direct.outcome == IpmOutcome::kConverged) {
    sol.status = SolveStatus::kFeasible;
    sol.X = direct.X;
    sol.Z = direct.Z;
    sol.w = direct.w;
    sol.y = direct.y;
    sol.message = "converged";
  } else if (!options.phase_one) {
    sol.status = SolveStatus::kNumericalFailure;
    sol.X = direct.X;
    sol.Z = direct.Z;
    sol.w = direct.w;
    sol.y = direct.y;
    sol.message = Describe(direct.outcome);
  } else {
    // min s  s.t.  A(X) + G w + s rhat = b,  sum_b Tr(X_b) + sigma = M,
    // with rhat = b - A(I) so that (I, 0, s = 1) is feasible.
    ConicProgram p1 = WithoutObjective(program);
    const int total = program.total_psd_dim();
    const double radius = options.phase_one_radius > 0
                              ? options.phase_one_radius
                              : std::max(1e4, 100.0 * total);
    std::vector<Eigen::MatrixXd> eye(program.num_blocks());
    for (int b = 0; b < program.num_blocks(); ++b) {
      eye[b] = Eigen::MatrixXd::Identity(program.block_dim(b),
                                         program.block_dim(b));
    }
    const Eigen::VectorXd rhat =
        program.rhs_vector() -
        program.EvaluateRows(eye, Eigen::VectorXd::Zero(program.num_free()));
    const int sblk = p1.AddPsdBlock(1, "phase1_s");
    const int satom = p1.AddAtom(sblk, {{0, 0, 1.0}});
    for (int r = 0; r < program.num_rows(); ++r) {
      p1.AddAtomCoefficient(r, satom, rhat(r));
    }
    const int sig = p1.AddPsdBlock(1, "phase1_sigma");
    const int trow = p1.AddRow(radius);
    for (int b = 0; b < program.num_blocks(); ++b) {
      SymSparse id;
      for (int i = 0; i < program.block_dim(b); ++i) id.push_back({i, i, 1.0});
      p1.AddAtomCoefficient(trow, p1.AddAtom(b, std::move(id)), 1.0);
    }
    p1.AddAtomCoefficient(trow, p1.AddAtom(sig, {{0, 0, 1.0}}), 1.0);
    p1.AddObjectiveAtom(satom, 1.0);
    SolverOptions o1 = options;
    o1.phase_one = false;
    const IpmResult ph = RunIpm(p1, o1);
    sol.iterations += ph.iterations;
    const double s_val = ph.X.empty() ? kInf : ph.X[sblk](0, 0);
    const int m = program.num_rows();
    bool certified = false;
    if (ph.outcome == IpmOutcome::kConverged && s_val > 10 * options.feasibility_tol) {
      FarkasCertificate cert = CleanCertificate(
          program, ph.y.head(m), radius);
      if (FarkasViolation(program, cert) <= 1e-9) {
        sol.status = SolveStatus::kInfeasibleCertified;
        sol.farkas = cert;
        sol.message = cert.global
                          ? "infeasible (Farkas certificate)"
                          : "infeasible within trace radius (Farkas certificate)";
        certified = true;
      }
    }
    if (!certified) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "direct solve: " + Describe(direct.outcome) +
                    "; phase-I: " + Describe(ph.outcome);
      const bool no_objective = program.objective_atoms().empty() &&
                                program.objective_free().empty();
      if (ph.outcome == IpmOutcome::kConverged && no_objective) {
        // A phase-I point with s ~ 0 solves a pure feasibility program.
        ConicSolution trial;
        trial.X.assign(ph.X.begin(), ph.X.begin() + program.num_blocks());
        trial.w = ph.w;
        const SolveResiduals r = ComputeResiduals(program, trial);
        if (r.primal_linf <= options.feasibility_tol && r.min_eig_X >= -1e-8) {
          sol.status = SolveStatus::kFeasible;
          sol.message = "feasible point from phase-I";
        }
      }
    }
    if (sol.status == SolveStatus::kFeasible || !certified) {
      const bool from_phase1 = sol.status == SolveStatus::kFeasible;
      const IpmResult& src = from_phase1 ? ph : direct;
      const int nb = program.num_blocks();
      sol.X.assign(src.X.begin(), src.X.begin() + std::min<size_t>(nb, src.X.size()));
      sol.Z.assign(src.Z.begin(), src.Z.begin() + std::min<size_t>(nb, src.Z.size()));
      sol.w = src.w;
      sol.y = src.y.size() >= m ? Eigen::VectorXd(src.y.head(m)) : src.y;
    }
  }
  if (static_cast<int>(sol.X.size()) == program.num_blocks()) {
    sol.residuals = ComputeResiduals(program, sol);
  }
  sol.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return sol;
}

}  // namespace ddccm
