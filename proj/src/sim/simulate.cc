#include "ddccm/sim/simulate.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace ddccm {

namespace {

using Field = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

Eigen::VectorXd Rk4Step(const Field& f, double t, const Eigen::VectorXd& x,
                        double h) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool Finite(const Eigen::VectorXd& x) { return x.allFinite(); }

// Advances x from t over `span` with error-controlled substeps. Returns
// false on divergence or step underflow.
bool Advance(const Field& f, double t, double span, Eigen::VectorXd* x,
             const IntegrateOptions& o, Trajectory* traj, double* step) {
  double done = 0.0;
  double h = std::min(*step, span);
  const double h_min = o.min_step_fraction * o.h;
  const double finish = span * (1.0 - 1e-12);
  while (done < finish) {
    h = std::min(h, span - done);
    const Eigen::VectorXd full = Rk4Step(f, t + done, *x, h);
    const Eigen::VectorXd half =
        Rk4Step(f, t + done + 0.5 * h, Rk4Step(f, t + done, *x, 0.5 * h), 0.5 * h);
    const double err =
        Finite(full) && Finite(half)
            ? (half - full).lpNorm<Eigen::Infinity>() / 15.0
            : std::numeric_limits<double>::infinity();
    // Round-off floor so that tiny steps can still be accepted.
    const double floor = 1e-14 * (1.0 + x->lpNorm<Eigen::Infinity>());
    if (err <= o.tol * h + floor) {
      *x = half;
      done += h;
      ++traj->steps;
      traj->max_error_rate = std::max(traj->max_error_rate, err / h);
      if (!Finite(*x) || x->norm() > o.divergence_norm) return false;
      // Grow back towards the nominal step when the error is small.
      if (err <= o.tol * h / 32.0) h = std::min(2.0 * h, o.h);
    } else {
      ++traj->rejected_steps;
      h *= 0.5;
      if (h < h_min) return false;
    }
  }
  *step = h;
  return true;
}

}  // namespace

Eigen::VectorXd PolynomialPlant::Drift(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return F * dict.Evaluate(x);
}

Eigen::VectorXd PolynomialPlant::Evaluate(
    const Eigen::Ref<const Eigen::VectorXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& u) const {
  Eigen::VectorXd dx = Drift(x);
  if (m() > 0) dx += G * u;
  return dx;
}

Trajectory IntegrateField(const Field& f, const Eigen::VectorXd& x0,
                          double t_end, const IntegrateOptions& o) {
  if (!(o.h > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("negative horizon");
  Trajectory traj;
  Eigen::VectorXd x = x0;
  traj.t.push_back(0.0);
  traj.x.push_back(x);
  const int n_out = static_cast<int>(std::ceil(t_end / o.h - 1e-9));
  double step = o.h;
  for (int k = 0; k < n_out; ++k) {
    const double t0 = k * o.h;
    const double t1 = std::min(t_end, (k + 1) * o.h);
    if (!Advance(f, t0, t1 - t0, &x, o, &traj, &step)) {
      traj.diverged = true;
      break;
    }
    traj.t.push_back(t1);
    traj.x.push_back(x);
  }
  return traj;
}

Trajectory Integrate(const PolynomialPlant& plant, const Controller& controller,
                     const Eigen::VectorXd& x0, double t_end,
                     const IntegrateOptions& o) {
  if (x0.size() != plant.n() || plant.dict.num_vars() != plant.n() ||
      plant.F.cols() != plant.dict.size() || plant.G.rows() != plant.n()) {
    throw std::invalid_argument("plant and initial state disagree in size");
  }
  const int m = plant.m();
  auto control = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (!controller || m == 0) return Eigen::VectorXd::Zero(m);
    Eigen::VectorXd u = controller(t, x);
    if (u.size() != m) throw std::invalid_argument("controller output size");
    return u;
  };
  Trajectory traj;
  if (!o.hold_control) {
    traj = IntegrateField(
        [&](double t, const Eigen::VectorXd& x) {
          return plant.Evaluate(x, control(t, x));
        },
        x0, t_end, o);
  } else {
    // One held control value per output interval.
    if (!(o.h > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("negative horizon");
    Eigen::VectorXd x = x0;
    traj.t.push_back(0.0);
    traj.x.push_back(x);
    const int n_out = static_cast<int>(std::ceil(t_end / o.h - 1e-9));
    double step = o.h;
    for (int k = 0; k < n_out; ++k) {
      const double t0 = k * o.h;
      const double t1 = std::min(t_end, (k + 1) * o.h);
      const Eigen::VectorXd u = control(t0, x);
      traj.u.push_back(u);
      const Field f = [&](double, const Eigen::VectorXd& z) {
        return plant.Evaluate(z, u);
      };
      if (!Advance(f, t0, t1 - t0, &x, o, &traj, &step)) {
        traj.diverged = true;
        break;
      }
      traj.t.push_back(t1);
      traj.x.push_back(x);
    }
    // The held values are the controls at the recorded states; only the
    // last state still needs one.
    if (!traj.diverged) traj.u.push_back(control(traj.t.back(), traj.x.back()));
    return traj;
  }
  for (size_t k = 0; k < traj.t.size(); ++k) {
    traj.u.push_back(control(traj.t[k], traj.x[k]));
  }
  return traj;
}

SampleSet GenerateDataset(const PolynomialPlant& plant,
                          const DatasetOptions& o) {
  if (o.num_trajectories < 1 || o.samples_per_trajectory < 2 ||
      !(o.horizon > 0.0)) {
    throw std::invalid_argument("invalid dataset options");
  }
  const int n = plant.n();
  SampleSet set;
  set.G = plant.G;
  set.dict = plant.dict;
  const double dt = o.horizon / (o.samples_per_trajectory - 1);
  std::vector<std::mt19937_64> noise_rngs;
  for (int traj = 0; traj < o.num_trajectories; ++traj) {
    std::seed_seq seq{static_cast<std::uint64_t>(o.seed),
                      static_cast<std::uint64_t>(traj), std::uint64_t{0}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-o.box, o.box);
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0(j) = u(rng);
    std::seed_seq noise_seq{static_cast<std::uint64_t>(o.seed),
                            static_cast<std::uint64_t>(traj), std::uint64_t{1}};
    noise_rngs.emplace_back(noise_seq);

    IntegrateOptions io = o.integrate;
    io.h = std::min(io.h, dt);
    // Sample on a grid commensurate with dt.
    const int sub = static_cast<int>(std::ceil(dt / io.h - 1e-9));
    io.h = dt / sub;
    const Trajectory tr = Integrate(plant, Controller(), x0, o.horizon, io);
    if (tr.diverged) {
      throw std::runtime_error("trajectory " + std::to_string(traj) +
                               " diverged during data generation");
    }
    for (int s = 0; s < o.samples_per_trajectory; ++s) {
      SampleRecord r;
      r.traj = traj;
      r.t = s * dt;
      r.x = tr.x.at(s * sub);
      r.u = Eigen::VectorXd::Zero(plant.m());
      r.xdot = plant.Evaluate(r.x, r.u);
      set.records.push_back(r);
    }
  }
  double max_abs = 0.0;
  for (const auto& r : set.records) {
    max_abs = std::max(max_abs, r.xdot.lpNorm<Eigen::Infinity>());
  }
  set.eps = o.noise ? o.noise_ratio * max_abs : 0.0;
  if (o.noise) {
    for (auto& r : set.records) {
      std::uniform_real_distribution<double> u(-set.eps, set.eps);
      for (int j = 0; j < n; ++j) r.xdot(j) += u(noise_rngs[r.traj]);
    }
  }
  return set;
}

void WriteTrajectoryCsv(const Trajectory& traj, std::ostream& os) {
  const int n = traj.x.empty() ? 0 : static_cast<int>(traj.x[0].size());
  const int m = traj.u.empty() ? 0 : static_cast<int>(traj.u[0].size());
  os << "t";
  for (int j = 0; j < n; ++j) os << ",x" << j + 1;
  for (int j = 0; j < m; ++j) os << ",u" << j + 1;
  os << "\n" << std::setprecision(12);
  for (size_t k = 0; k < traj.t.size(); ++k) {
    os << traj.t[k];
    for (int j = 0; j < n; ++j) os << "," << traj.x[k](j);
    for (int j = 0; j < m && k < traj.u.size(); ++j) os << "," << traj.u[k](j);
    os << "\n";
  }
}

}  // namespace ddccm
