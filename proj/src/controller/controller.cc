#include "ddccm/controller/controller.h"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace ddccm {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::MatrixXd InverseChecked(const Eigen::MatrixXd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (W + W.transpose()));
  const Eigen::VectorXd e = eig.eigenvalues();
  if (!(e(0) > 0.0) || e(e.size() - 1) > kMaxCondition * e(0)) {
    throw SingularMetric("W(x) is singular or ill-conditioned");
  }
  const Eigen::MatrixXd& V = eig.eigenvectors();
  return V * e.cwiseInverse().asDiagonal() * V.transpose();
}

std::vector<Eigen::VectorXd> StraightLine(const Eigen::VectorXd& target, int N) {
  std::vector<Eigen::VectorXd> knots(N + 1);
  for (int k = 0; k <= N; ++k) knots[k] = (static_cast<double>(k) / N) * target;
  knots[N] = target;
  return knots;
}

// Solves H d = g for the block-tridiagonal H with diagonal blocks
// 2N (M_{k-1} + M_k) and off-diagonal blocks -2N M_k (interior knots only).
std::vector<Eigen::VectorXd> SolvePreconditioner(
    const std::vector<Eigen::MatrixXd>& M, const std::vector<Eigen::VectorXd>& g,
    int N) {
  const int m = N - 1;
  std::vector<Eigen::MatrixXd> D(m), C(m);
  std::vector<Eigen::VectorXd> r(m);
  for (int i = 0; i < m; ++i) {
    const int k = i + 1;
    D[i] = 2.0 * N * (M[k - 1] + M[k]);
    r[i] = g[k];
    if (i + 1 < m) C[i] = -2.0 * N * M[k];
  }
  // Forward elimination: D_i <- D_i - C_{i-1}' D_{i-1}^{-1} C_{i-1}.
  std::vector<Eigen::LLT<Eigen::MatrixXd>> fac(m);
  for (int i = 0; i < m; ++i) {
    if (i > 0) {
      D[i] -= C[i - 1].transpose() * fac[i - 1].solve(C[i - 1]);
      r[i] -= C[i - 1].transpose() * fac[i - 1].solve(r[i - 1]);
    }
    fac[i].compute(D[i]);
  }
  std::vector<Eigen::VectorXd> d(N + 1, Eigen::VectorXd::Zero(g[0].size()));
  for (int i = m - 1; i >= 0; --i) {
    Eigen::VectorXd rhs = r[i];
    if (i + 1 < m) rhs -= C[i] * d[i + 2];
    d[i + 1] = fac[i].solve(rhs);
  }
  return d;
}

double SafeEnergy(const MetricField& metric, const std::vector<Eigen::VectorXd>& knots) {
  try {
    const double e = PathEnergy(metric, knots);
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  } catch (const SingularMetric&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Eigen::MatrixXd DifferentialGain(const Certificate& cert,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::MatrixXd Winv = InverseChecked(cert.W.Evaluate(x));
  if (cert.G.cols() == 0) return Eigen::MatrixXd::Zero(0, cert.n);
  return -0.5 * cert.rho.Evaluate(x) * cert.G.transpose() * Winv;
}

MetricField CertificateMetric(const Certificate& cert) {
  MetricField f;
  f.n = cert.n;
  const PolyMatrix W = cert.W;
  std::vector<PolyMatrix> dW;
  for (int j = 0; j < cert.n; ++j) dW.push_back(W.Differentiate(j));
  f.M = [W](const Eigen::VectorXd& x) { return InverseChecked(W.Evaluate(x)); };
  f.dM = [W, dW](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd M = InverseChecked(W.Evaluate(x));
    std::vector<Eigen::MatrixXd> out;
    for (const auto& d : dW) out.push_back(-M * d.Evaluate(x) * M);
    return out;
  };
  return f;
}

MetricField ConstantMetric(const Eigen::MatrixXd& M) {
  MetricField f;
  f.n = static_cast<int>(M.rows());
  f.M = [M](const Eigen::VectorXd&) { return M; };
  f.dM = [M](const Eigen::VectorXd&) {
    return std::vector<Eigen::MatrixXd>(M.rows(),
                                        Eigen::MatrixXd::Zero(M.rows(), M.cols()));
  };
  return f;
}

double PathEnergy(const MetricField& metric,
                  const std::vector<Eigen::VectorXd>& knots,
                  std::vector<Eigen::VectorXd>* gradient,
                  std::vector<double>* segment_energy) {
  const int N = static_cast<int>(knots.size()) - 1;
  if (N < 1) throw std::invalid_argument("a path needs at least two knots");
  const int n = static_cast<int>(knots[0].size());
  if (gradient) gradient->assign(N + 1, Eigen::VectorXd::Zero(n));
  if (segment_energy) segment_energy->assign(N, 0.0);
  double energy = 0.0;
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd delta = knots[k + 1] - knots[k];
    const Eigen::VectorXd mid = 0.5 * (knots[k] + knots[k + 1]);
    const Eigen::MatrixXd M = metric.M(mid);
    const Eigen::VectorXd Md = M * delta;
    const double e = N * delta.dot(Md);
    energy += e;
    if (segment_energy) (*segment_energy)[k] = e;
    if (gradient) {
      const std::vector<Eigen::MatrixXd> dM = metric.dM(mid);
      Eigen::VectorXd q(n);
      for (int j = 0; j < n; ++j) q(j) = 0.5 * N * delta.dot(dM[j] * delta);
      // d/d gamma_{k+1} and d/d gamma_k of N delta' M(mid) delta.
      (*gradient)[k + 1] += 2.0 * N * Md + q;
      (*gradient)[k] += -2.0 * N * Md + q;
    }
  }
  if (gradient) {
    (*gradient)[0].setZero();
    (*gradient)[N].setZero();
  }
  return energy;
}

GeodesicPath Geodesic(const MetricField& metric, const Eigen::VectorXd& target,
                      const GeodesicOptions& o,
                      const std::vector<Eigen::VectorXd>* initial) {
  const int N = o.segments;
  if (N < 2) throw std::invalid_argument("a geodesic needs N >= 2 segments");
  if (!target.allFinite()) throw std::invalid_argument("non-finite target");
  if (target.size() != metric.n) throw std::invalid_argument("target size mismatch");
  GeodesicPath path;
  path.N = N;
  std::vector<Eigen::VectorXd> knots = StraightLine(target, N);
  path.straight_energy = PathEnergy(metric, knots);
  double energy = path.straight_energy;
  if (initial && static_cast<int>(initial->size()) == N + 1) {
    std::vector<Eigen::VectorXd> warm = *initial;
    warm[0].setZero();
    warm[N] = target;
    const double e = SafeEnergy(metric, warm);
    if (e < energy) {
      knots = std::move(warm);
      energy = e;
    }
  }
  std::vector<Eigen::VectorXd> grad;
  std::vector<Eigen::MatrixXd> Ms(N);
  for (int it = 0;; ++it) {
    energy = PathEnergy(metric, knots, &grad);
    path.energy_history.push_back(energy);
    double ginf = 0.0;
    for (const auto& g : grad) ginf = std::max(ginf, g.cwiseAbs().maxCoeff());
    path.gradient_inf = ginf;
    path.iterations = it;
    if (ginf <= o.tolerance * (1.0 + energy)) {
      path.converged = true;
      break;
    }
    if (it >= o.max_iterations) {
      path.warning = "iteration cap reached";
      break;
    }
    for (int k = 0; k < N; ++k) Ms[k] = metric.M(0.5 * (knots[k] + knots[k + 1]));
    const std::vector<Eigen::VectorXd> d = SolvePreconditioner(Ms, grad, N);
    double slope = 0.0;
    for (int k = 1; k < N; ++k) slope += grad[k].dot(d[k]);
    // d solves H d = g with H positive definite, so -d is a descent direction.
    double alpha = 1.0;
    bool accepted = false;
    std::vector<Eigen::VectorXd> trial = knots;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      for (int k = 1; k < N; ++k) trial[k] = knots[k] - alpha * d[k];
      const double e = SafeEnergy(metric, trial);
      if (e <= energy - o.armijo * alpha * slope) {
        knots.swap(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      path.warning = "line search stalled";
      break;
    }
  }
  path.energy = PathEnergy(metric, knots, nullptr, &path.segment_energy);
  path.energy_history.push_back(path.energy);
  path.knots = std::move(knots);
  return path;
}

Eigen::VectorXd PathFeedback(const Certificate& cert, const GeodesicPath& path) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(cert.G.cols());
  for (int k = 0; k < path.N; ++k) {
    const Eigen::VectorXd mid = 0.5 * (path.knots[k] + path.knots[k + 1]);
    u += DifferentialGain(cert, mid) * (path.knots[k + 1] - path.knots[k]);
  }
  return u;
}

Eigen::VectorXd Feedback(const Certificate& cert,
                         const Eigen::Ref<const Eigen::VectorXd>& x,
                         const GeodesicOptions& options) {
  return PathFeedback(cert, Geodesic(CertificateMetric(cert), x, options));
}

GeodesicController::GeodesicController(const Certificate& cert,
                                       GeodesicOptions options)
    : cert_(&cert), metric_(CertificateMetric(cert)), options_(options) {}

Eigen::VectorXd GeodesicController::operator()(const Eigen::VectorXd& x) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Eigen::VectorXd> warm;
  if (have_last_) {
    // Shift the previous path linearly so that it ends at x.
    const Eigen::VectorXd shift = x - last_.knots.back();
    warm = last_.knots;
    for (int k = 0; k <= last_.N; ++k) {
      warm[k] += (static_cast<double>(k) / last_.N) * shift;
    }
  }
  last_ = Geodesic(metric_, x, options_, have_last_ ? &warm : nullptr);
  have_last_ = true;
  ++solves_;
  if (!last_.warning.empty()) ++warnings_;
  max_solve_time_ = std::max(
      max_solve_time_,
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count());
  return PathFeedback(*cert_, last_);
}

void WriteGeodesicCsv(const GeodesicPath& path, std::ostream& os) {
  const int n = path.knots.empty() ? 0 : static_cast<int>(path.knots[0].size());
  os << "s";
  for (int j = 0; j < n; ++j) os << ",x" << j + 1;
  os << ",segment_energy\n" << std::setprecision(12);
  for (int k = 0; k <= path.N; ++k) {
    os << static_cast<double>(k) / path.N;
    for (int j = 0; j < n; ++j) os << "," << path.knots[k](j);
    os << ",";
    if (k < path.N) os << path.segment_energy[k];
    os << "\n";
  }
}

}  // namespace ddccm
