#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddccm/cli/config.h"
#include "ddccm/data/samples.h"
#include "ddccm/dualprog/certificate.h"
#include "ddccm/sim/simulate.h"

namespace ddccm {

/// Outcome of one command. Artifacts are paths relative to the working
/// directory, in the order written.
struct CommandResult {
  int exit_code{0};
  std::vector<std::string> artifacts;
};

const std::vector<std::string>& CommandNames();

/// The dataset a config refers to: the CSV at data_path, else data
/// generated from the true plant. An explicit eps overrides the file's.
/// Throws ConfigError when neither source is available.
SampleSet PipelineDataset(const PipelineConfig& config);

/// Certificate stored in `<output_dir>/certificate.json` by synth; empty
/// when synthesis was infeasible. Throws std::runtime_error when the file
/// is missing or malformed.
std::optional<Certificate> LoadCertificateArtifact(const std::string& path);

struct ClosedLoopOptions {
  double horizon{5.0};
  /// Zero-order-hold period and output spacing.
  double step{0.01};
  int segments{100};
};

/// Closed loop under a warm-started GeodesicController with the control held
/// over each step; distance[k] is the geodesic distance from the origin to
/// the recorded state x[k].
struct ClosedLoopRun {
  Eigen::VectorXd x0;
  Trajectory traj;
  std::vector<double> distance;
  bool diverged{false};
  /// Set when integration or a geodesic solve threw.
  std::string error;
  int geodesic_warnings{0};
  /// Slowest geodesic solve, seconds.
  double max_solve_time{0.0};
  /// min over recorded t of log d(0) - log d(t) - (lambda t - 0.5).
  double decrease_margin{std::numeric_limits<double>::infinity()};
  double final_norm_ratio{0.0};
  /// Largest |x_j| along the trajectory.
  double max_abs_state{0.0};
};

ClosedLoopRun SimulateClosedLoop(const PolynomialPlant& plant,
                                 const Certificate& cert,
                                 const Eigen::VectorXd& x0,
                                 const ClosedLoopOptions& options = {});

/// generate: data.csv.
CommandResult RunGenerate(const PipelineConfig& config, std::ostream& log);
/// synth: certificate.json with a status field. Infeasibility exits 0.
CommandResult RunSynth(const PipelineConfig& config, std::ostream& log);
/// verify: verification.json and .txt; exits 1 when a check fails or there
/// is no certificate.
CommandResult RunVerify(const PipelineConfig& config, std::ostream& log);
/// simulate: closed-loop trajectories from random initial states under the
/// geodesic controller, with the Riemannian distance to the origin.
/// Writes closed_loop.csv, simulation.json and SVG renders.
CommandResult RunSimulate(const PipelineConfig& config, std::ostream& log);
/// geodesic: geodesic.csv from the origin to the configured target.
CommandResult RunGeodesic(const PipelineConfig& config, std::ostream& log);
/// generate, synth, verify and simulate for every config, each into its
/// own output directory, then report.json and report.txt in `output_dir`.
/// Exits 1 when any verification fails.
CommandResult RunReport(const std::vector<PipelineConfig>& configs,
                        const std::string& output_dir, std::ostream& log);

/// Dispatches a single-config command; `report` runs the config alone.
/// Throws std::invalid_argument for an unknown command.
CommandResult RunCommand(const std::string& command,
                         const PipelineConfig& config, std::ostream& log);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line chart with fixed-precision coordinates, so equal input
/// yields equal bytes.
std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<Series>& series);

}  // namespace ddccm
