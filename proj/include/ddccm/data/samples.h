#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/polyalg/poly_matrix.h"

namespace ddccm {

/// One measurement x[i], xdot[i], u[i] taken at time t on trajectory `traj`.
struct SampleRecord {
  int traj{0};
  double t{0.0};
  Eigen::VectorXd x;
  Eigen::VectorXd xdot;
  Eigen::VectorXd u;
};

/// Measurements of xdot = F phi(x) + G u with |xdot noise|_inf <= eps.
struct SampleSet {
  std::vector<SampleRecord> records;
  Eigen::MatrixXd G;
  double eps{0.0};
  MonomialDictionary dict;

  int num_states() const { return static_cast<int>(G.rows()); }
  int num_inputs() const { return static_cast<int>(G.cols()); }
  int num_samples() const { return static_cast<int>(records.size()); }

  /// Throws std::invalid_argument unless every record matches G, eps >= 0 and
  /// the dictionary lives in the state variables.
  void Validate() const;
};

struct LoadOptions {
  /// Estimate xdot by finite differences when the file has no xdot columns.
  bool finite_difference{false};
  /// Used when the file does not declare them in its `# key: value` header.
  MonomialDictionary dict;
  Eigen::MatrixXd G;
  /// Negative means "take from header, else estimate from xdot".
  double eps{-1.0};
};

/// Reads the `traj,t,x1..xn[,xdot1..xdotn],u1..um` CSV. Leading lines of the
/// form `# dictionary: [[1,0],[0,2]]`, `# G: [[1,0],[0,1]]` (row-major JSON)
/// and `# eps: 0.1` supply problem metadata. Throws std::runtime_error on
/// schema errors, non-finite values or ragged rows.
SampleSet LoadSamples(const std::string& path, const LoadOptions& options);
SampleSet ParseSamples(const std::string& text, const LoadOptions& options);

/// Writes the schema read by LoadSamples, with metadata header lines.
std::string FormatSamples(const SampleSet& samples);
void SaveSamples(const SampleSet& samples, const std::string& path);

/// Central differences inside each trajectory, second-order one-sided
/// differences at its endpoints. Records must be grouped by trajectory with
/// strictly increasing t and at least 3 samples per trajectory.
std::vector<SampleRecord> FiniteDifferenceDerivatives(
    std::vector<SampleRecord> records);

/// (1/15) max_i |xdot[i]|_inf.
double EstimateNoiseBound(const std::vector<SampleRecord>& records);

}  // namespace ddccm
