#pragma once

#include <memory>
#include <string>

#include "ddccm/sdp/conic_program.h"
#include "ddccm/sdp/solver.h"

namespace ddccm {

/// Interchangeable conic solver.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution Solve(const ConicProgram& program,
                              const SolverOptions& options) const = 0;
};

/// The built-in interior-point solver.
class EmbeddedBackend final : public SolverBackend {
 public:
  std::string name() const override { return "embedded"; }
  ConicSolution Solve(const ConicProgram& program,
                      const SolverOptions& options) const override;
};

/// Runs a shell command on an SDPA problem file. The command template's
/// "{problem}" and "{solution}" placeholders are replaced by file paths; the
/// command must write a CSDP-style solution. A point is reported feasible
/// only if its recomputed residuals meet the tolerances; anything else is a
/// numerical failure, since external exit codes are not certificates.
class ExternalBackend final : public SolverBackend {
 public:
  explicit ExternalBackend(std::string command_template);
  std::string name() const override { return "external"; }
  ConicSolution Solve(const ConicProgram& program,
                      const SolverOptions& options) const override;

 private:
  std::string command_;
};

/// "embedded" or "external:<command template>".
std::unique_ptr<SolverBackend> MakeBackend(const std::string& spec);

}  // namespace ddccm
