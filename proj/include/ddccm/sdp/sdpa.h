#pragma once

#include <string>
#include <vector>

#include "ddccm/sdp/conic_program.h"
#include "ddccm/sdp/solver.h"

namespace ddccm {

/// Sparse SDPA text in the CSDP convention: maximize <F0, X> subject to
/// <F_r, X> = c_r. The minimization objective is negated into F0 and each
/// free variable becomes a pair of entries in a trailing LP block.
std::string WriteSdpa(const ConicProgram& program);

/// Where each program block read from SDPA text lives in the file: its
/// 1-based SDPA block and, for entries of LP blocks, the 1-based diagonal
/// index (0 for PSD blocks).
struct SdpaLayout {
  std::vector<int> sdpa_block;
  std::vector<int> lp_index;
};

/// Reads sparse SDPA text. Each (matrix, block) pair becomes one atom; LP
/// blocks become 1x1 PSD blocks. Throws std::runtime_error on malformed input.
ConicProgram ReadSdpa(const std::string& text, SdpaLayout* layout = nullptr);

/// CSDP-style solution text: the dual vector on one line, then
/// "1 block i j value" lines for Z and "2 block i j value" lines for X, all in
/// the layout produced by WriteSdpa.
std::string WriteSdpaSolution(const ConicProgram& program,
                              const ConicSolution& solution);
/// As above for a program obtained from ReadSdpa, in the file's layout.
std::string WriteSdpaSolution(const ConicProgram& program,
                              const ConicSolution& solution,
                              const SdpaLayout& layout);

/// Parses a solution written for `program`'s SDPA layout back into blocks,
/// free variables (w = w+ - w-) and the dual vector.
ConicSolution ReadSdpaSolution(const ConicProgram& program,
                               const std::string& text);

}  // namespace ddccm
