#include "ddccm/sdp/backend.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ddccm/sdp/sdpa.h"

namespace ddccm {
namespace {

void ReplaceAll(std::string* s, const std::string& from, const std::string& to) {
  for (size_t pos = s->find(from); pos != std::string::npos;
       pos = s->find(from, pos + to.size())) {
    s->replace(pos, from.size(), to);
  }
}

}  // namespace

ConicSolution EmbeddedBackend::Solve(const ConicProgram& program,
                                     const SolverOptions& options) const {
  return ddccm::Solve(program, options);
}

ExternalBackend::ExternalBackend(std::string command_template)
    : command_(std::move(command_template)) {
  if (command_.find("{problem}") == std::string::npos ||
      command_.find("{solution}") == std::string::npos) {
    throw std::invalid_argument(
        "external command needs {problem} and {solution} placeholders");
  }
}

ConicSolution ExternalBackend::Solve(const ConicProgram& program,
                                     const SolverOptions& options) const {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  std::random_device rd;
  const fs::path dir =
      fs::temp_directory_path() / ("ddccm_sdp_" + std::to_string(rd()));
  fs::create_directories(dir);
  const fs::path problem = dir / "problem.dat-s";
  const fs::path solution = dir / "solution.sol";
  {
    std::ofstream f(problem);
    f << WriteSdpa(program);
  }
  std::string cmd = command_;
  ReplaceAll(&cmd, "{problem}", problem.string());
  ReplaceAll(&cmd, "{solution}", solution.string());
  const int code = std::system(cmd.c_str());
  ConicSolution s;
  std::ifstream f(solution);
  if (f) {
    std::stringstream buf;
    buf << f.rdbuf();
    try {
      s = ReadSdpaSolution(program, buf.str());
    } catch (const std::exception& e) {
      s.message = std::string("unreadable solution: ") + e.what();
    }
  } else {
    s.message = "no solution file";
  }
  fs::remove_all(dir);
  s.status = SolveStatus::kNumericalFailure;
  if (static_cast<int>(s.X.size()) == program.num_blocks()) {
    s.residuals = ComputeResiduals(program, s);
    if (s.residuals.primal_linf <= options.feasibility_tol &&
        s.residuals.min_eig_X >= -1e-8) {
      s.status = SolveStatus::kFeasible;
      s.message = "external solver point verified";
    } else if (s.message.empty()) {
      s.message = "external point fails residual checks";
    }
  }
  if (code != 0) s.message += " (exit code " + std::to_string(code) + ")";
  s.wall_time = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return s;
}

std::unique_ptr<SolverBackend> MakeBackend(const std::string& spec) {
  if (spec.empty() || spec == "embedded") {
    return std::make_unique<EmbeddedBackend>();
  }
  const std::string prefix = "external:";
  if (spec.rfind(prefix, 0) == 0) {
    return std::make_unique<ExternalBackend>(spec.substr(prefix.size()));
  }
  throw std::invalid_argument("unknown solver backend: " + spec);
}

}  // namespace ddccm
