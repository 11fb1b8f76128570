// Solves a sparse SDPA problem with the embedded interior-point solver and
// writes a CSDP-style solution. Exit code 0: solved, 1: infeasible,
// 2: numerical failure, 3: usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ddccm/sdp/sdpa.h"
#include "ddccm/sdp/solver.h"

int main(int argc, char** argv) {
  CLI::App app{"Solve a sparse SDPA problem"};
  std::string problem_path, solution_path;
  ddccm::SolverOptions options;
  app.add_option("problem", problem_path, "SDPA .dat-s file")->required();
  app.add_option("solution", solution_path, "output solution file")->required();
  app.add_option("--feas-tol", options.feasibility_tol);
  app.add_option("--gap-tol", options.gap_tol);
  app.add_option("--max-iter", options.max_iterations);
  app.add_flag("--verbose", options.verbose);
  CLI11_PARSE(app, argc, argv);
  try {
    std::ifstream f(problem_path);
    if (!f) throw std::runtime_error("cannot open " + problem_path);
    std::stringstream buf;
    buf << f.rdbuf();
    ddccm::SdpaLayout layout;
    const ddccm::ConicProgram program = ddccm::ReadSdpa(buf.str(), &layout);
    const ddccm::ConicSolution sol = ddccm::Solve(program, options);
    std::ofstream out(solution_path);
    out << ddccm::WriteSdpaSolution(program, sol, layout);
    std::cout << ddccm::ToString(sol.status) << ": " << sol.message << "\n";
    switch (sol.status) {
      case ddccm::SolveStatus::kFeasible: return 0;
      case ddccm::SolveStatus::kInfeasibleCertified: return 1;
      case ddccm::SolveStatus::kNumericalFailure: return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 3;
}
