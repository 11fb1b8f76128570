#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/dualprog/certificate.h"

namespace ddccm {

/// Thrown when W(x) is too ill-conditioned to invert (condition > 1e12).
class SingularMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// -1/2 rho(x) G' W(x)^{-1}, an m x n matrix.
Eigen::MatrixXd DifferentialGain(const Certificate& cert,
                                 const Eigen::Ref<const Eigen::VectorXd>& x);

/// A Riemannian metric M(x) with its partial derivatives dM/dx_j.
struct MetricField {
  int n{0};
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> M;
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> dM;
};

/// M = W^{-1}, dM/dx_j = -M (dW/dx_j) M. Throws SingularMetric on evaluation
/// where W is ill-conditioned.
MetricField CertificateMetric(const Certificate& cert);

/// Constant metric M.
MetricField ConstantMetric(const Eigen::MatrixXd& M);

struct GeodesicOptions {
  /// Number of linear segments N >= 2.
  int segments{100};
  int max_iterations{500};
  /// Stationarity: |grad energy|_inf <= tolerance * (1 + energy).
  double tolerance{1e-6};
  /// Armijo sufficient-decrease constant.
  double armijo{1e-4};
};

/// Piecewise-linear path gamma_0 = 0, ..., gamma_N = target.
struct GeodesicPath {
  std::vector<Eigen::VectorXd> knots;
  int N{0};
  /// sum_k N (gamma_{k+1} - gamma_k)' M(mid_k) (gamma_{k+1} - gamma_k).
  double energy{0.0};
  /// Energy of the straight line, an upper bound on `energy`.
  double straight_energy{0.0};
  std::vector<double> segment_energy;
  /// Energy at the start of every iteration, then the final energy.
  std::vector<double> energy_history;
  int iterations{0};
  double gradient_inf{0.0};
  bool converged{false};
  /// Set when the iteration cap was reached; the best path is returned.
  std::string warning;
};

/// Energy of the discretized path and its gradient with respect to the
/// interior knots (gradient entries for the endpoints are zero).
double PathEnergy(const MetricField& metric,
                  const std::vector<Eigen::VectorXd>& knots,
                  std::vector<Eigen::VectorXd>* gradient = nullptr,
                  std::vector<double>* segment_energy = nullptr);

/// Local minimizer of the discretized energy from the origin to `target`.
/// Preconditioned gradient descent on the interior knots (endpoints are held
/// fixed, which is the projection) with Armijo backtracking; the
/// preconditioner is the block-tridiagonal energy Hessian with M frozen.
/// Starts from `initial` when it has N + 1 knots, else from the straight line.
/// Energy never increases across iterations.
GeodesicPath Geodesic(const MetricField& metric, const Eigen::VectorXd& target,
                      const GeodesicOptions& options = {},
                      const std::vector<Eigen::VectorXd>* initial = nullptr);

/// u = sum_k -1/2 rho(mid_k) G' W(mid_k)^{-1} (gamma_{k+1} - gamma_k).
Eigen::VectorXd PathFeedback(const Certificate& cert, const GeodesicPath& path);

/// Geodesic under M = W^{-1} followed by PathFeedback.
Eigen::VectorXd Feedback(const Certificate& cert,
                         const Eigen::Ref<const Eigen::VectorXd>& x,
                         const GeodesicOptions& options = {});

/// Stateful feedback that warm-starts each geodesic from the previous one,
/// rescaled to the new target.
class GeodesicController {
 public:
  GeodesicController(const Certificate& cert, GeodesicOptions options = {});

  Eigen::VectorXd operator()(const Eigen::VectorXd& x);
  const GeodesicPath& last_path() const { return last_; }
  /// Largest geodesic wall time seen, seconds.
  double max_solve_time() const { return max_solve_time_; }
  int solves() const { return solves_; }
  int warnings() const { return warnings_; }

 private:
  const Certificate* cert_;
  MetricField metric_;
  GeodesicOptions options_;
  GeodesicPath last_;
  bool have_last_{false};
  double max_solve_time_{0.0};
  int solves_{0};
  int warnings_{0};
};

/// "s,x1..xn,segment_energy" rows, one per knot (the last knot's segment
/// energy is empty).
void WriteGeodesicCsv(const GeodesicPath& path, std::ostream& os);

}  // namespace ddccm
