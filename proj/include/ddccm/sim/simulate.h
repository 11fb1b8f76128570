#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/data/samples.h"
#include "ddccm/polyalg/poly_matrix.h"

namespace ddccm {

/// xdot = F phi(x) + G u.
struct PolynomialPlant {
  Eigen::MatrixXd F;
  MonomialDictionary dict;
  Eigen::MatrixXd G;

  int n() const { return static_cast<int>(F.rows()); }
  int m() const { return static_cast<int>(G.cols()); }
  Eigen::VectorXd Drift(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& u) const;
};

/// u(t, x). An empty function means open loop (u = 0).
using Controller =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;

struct IntegrateOptions {
  /// Output spacing and largest internal step.
  double h{0.01};
  /// Accepted local error per unit time, estimated by step halving.
  double tol{1e-8};
  double divergence_norm{1e6};
  /// Smallest internal step as a fraction of h.
  double min_step_fraction{1e-8};
  /// Zero-order hold: evaluate the controller once per output step instead
  /// of at every Runge-Kutta stage.
  bool hold_control{false};
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  /// Control at each output time (empty vectors when m = 0).
  std::vector<Eigen::VectorXd> u;
  bool diverged{false};
  int steps{0};
  int rejected_steps{0};
  /// Largest accepted local error estimate per unit time.
  double max_error_rate{0.0};
};

/// Classical RK4; each step is compared with two half steps and halved
/// until the local error per unit time is below tol. The state is recorded
/// at multiples of h up to t_end. Stops with `diverged` once |x| exceeds
/// divergence_norm or the step underflows. Throws std::invalid_argument on
/// h <= 0, t_end < 0 or a size mismatch.
Trajectory Integrate(const PolynomialPlant& plant, const Controller& controller,
                     const Eigen::VectorXd& x0, double t_end,
                     const IntegrateOptions& options = {});

/// Generic form for an arbitrary vector field f(t, x).
Trajectory IntegrateField(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double t_end, const IntegrateOptions& options);

struct DatasetOptions {
  int num_trajectories{6};
  int samples_per_trajectory{10};
  /// Samples are uniformly spaced on [0, horizon].
  double horizon{2.0};
  /// Initial states uniform in [-box, box]^n.
  double box{1.0};
  /// Uniform xdot noise bounded by max_i |xdot[i]|_inf / 15 when on.
  bool noise{true};
  double noise_ratio{1.0 / 15.0};
  std::uint64_t seed{1};
  IntegrateOptions integrate;
};

/// Open-loop (u = 0) data from the plant; xdot is evaluated from the model
/// and then perturbed. Every trajectory owns its RNG stream, so the result
/// depends only on the seed. Throws std::runtime_error if a trajectory
/// diverges before the horizon.
SampleSet GenerateDataset(const PolynomialPlant& plant,
                          const DatasetOptions& options);

/// "t,x1..xn,u1..um" rows.
void WriteTrajectoryCsv(const Trajectory& traj, std::ostream& os);

}  // namespace ddccm
