#include "ddccm/sdp/sdpa.h"

#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace ddccm {
namespace {

using Key = std::tuple<int, int, int, int>;  // matrix, block (1-based), i, j

void Emit(std::map<Key, double>* acc, int mat, int blk, int i, int j,
          double v) {
  if (i > j) std::swap(i, j);
  (*acc)[{mat, blk, i, j}] += v;
}

std::string NextDataLine(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    if (line[b] == '"' || line[b] == '*') continue;
    return line;
  }
  throw std::runtime_error("unexpected end of SDPA input");
}

std::string Clean(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  }
  return s;
}

}  // namespace

std::string WriteSdpa(const ConicProgram& p) {
  const int nb = p.num_blocks();
  const int nf = p.num_free();
  const int lp = nb + 1;  // 1-based index of the LP block
  std::map<Key, double> acc;
  for (const auto& [a, c] : p.objective_atoms()) {
    for (const auto& e : p.atom(a)) {
      Emit(&acc, 0, p.atom_block(a) + 1, e.i + 1, e.j + 1, -c * e.value);
    }
  }
  for (const auto& [f, c] : p.objective_free()) {
    Emit(&acc, 0, lp, 2 * f + 1, 2 * f + 1, -c);
    Emit(&acc, 0, lp, 2 * f + 2, 2 * f + 2, c);
  }
  for (int r = 0; r < p.num_rows(); ++r) {
    for (const auto& [a, c] : p.row_atoms(r)) {
      for (const auto& e : p.atom(a)) {
        Emit(&acc, r + 1, p.atom_block(a) + 1, e.i + 1, e.j + 1, c * e.value);
      }
    }
    for (const auto& [f, c] : p.row_free(r)) {
      Emit(&acc, r + 1, lp, 2 * f + 1, 2 * f + 1, c);
      Emit(&acc, r + 1, lp, 2 * f + 2, 2 * f + 2, -c);
    }
  }
  std::ostringstream out;
  out << std::setprecision(17);
  out << "\"exported conic program\n";
  out << p.num_rows() << "\n" << (nb + (nf > 0 ? 1 : 0)) << "\n";
  for (int b = 0; b < nb; ++b) out << p.block_dim(b) << (b + 1 < nb || nf ? " " : "");
  if (nf > 0) out << -2 * nf;
  out << "\n";
  for (int r = 0; r < p.num_rows(); ++r) {
    out << p.rhs(r) << (r + 1 < p.num_rows() ? " " : "");
  }
  out << "\n";
  for (const auto& [k, v] : acc) {
    if (v == 0.0) continue;
    const auto& [mat, blk, i, j] = k;
    out << mat << " " << blk << " " << i << " " << j << " " << v << "\n";
  }
  return out.str();
}

ConicProgram ReadSdpa(const std::string& text, SdpaLayout* layout) {
  std::istringstream in(text);
  int m = 0, nblocks = 0;
  std::istringstream(Clean(NextDataLine(in))) >> m;
  std::istringstream(Clean(NextDataLine(in))) >> nblocks;
  if (m < 0 || nblocks <= 0) throw std::runtime_error("bad SDPA header");
  std::vector<int> sizes;
  {
    std::istringstream ls(Clean(NextDataLine(in)));
    int s;
    while (static_cast<int>(sizes.size()) < nblocks && ls >> s) sizes.push_back(s);
    if (static_cast<int>(sizes.size()) != nblocks) {
      throw std::runtime_error("bad SDPA block structure");
    }
  }
  std::vector<double> c;
  {
    std::string line;
    while (static_cast<int>(c.size()) < m) {
      std::istringstream ls(Clean(NextDataLine(in)));
      double v;
      while (ls >> v) c.push_back(v);
    }
    if (static_cast<int>(c.size()) != m) throw std::runtime_error("bad SDPA c");
  }
  ConicProgram p;
  // First program block for each SDPA block; LP blocks expand to 1x1 blocks.
  std::vector<int> first(nblocks);
  SdpaLayout local;
  for (int b = 0; b < nblocks; ++b) {
    first[b] = p.num_blocks();
    if (sizes[b] > 0) {
      p.AddPsdBlock(sizes[b]);
      local.sdpa_block.push_back(b + 1);
      local.lp_index.push_back(0);
    } else if (sizes[b] < 0) {
      for (int k = 0; k < -sizes[b]; ++k) {
        p.AddPsdBlock(1);
        local.sdpa_block.push_back(b + 1);
        local.lp_index.push_back(k + 1);
      }
    } else {
      throw std::runtime_error("zero block size");
    }
  }
  for (int r = 0; r < m; ++r) p.AddRow(c[r]);
  std::map<std::pair<int, int>, SymSparse> mats;  // (matrix, program block)
  std::string line;
  while (std::getline(in, line)) {
    const auto b0 = line.find_first_not_of(" \t\r");
    if (b0 == std::string::npos || line[b0] == '"' || line[b0] == '*') continue;
    std::istringstream ls(Clean(line));
    int mat, blk, i, j;
    double v;
    if (!(ls >> mat >> blk >> i >> j >> v)) {
      throw std::runtime_error("bad SDPA entry: " + line);
    }
    if (mat < 0 || mat > m || blk < 1 || blk > nblocks) {
      throw std::runtime_error("SDPA entry out of range: " + line);
    }
    if (i > j) std::swap(i, j);
    const int size = sizes[blk - 1];
    if (i < 1 || j > std::abs(size)) {
      throw std::runtime_error("SDPA index out of range: " + line);
    }
    if (size < 0) {
      if (i != j) throw std::runtime_error("off-diagonal LP entry: " + line);
      mats[{mat, first[blk - 1] + i - 1}].push_back({0, 0, v});
    } else {
      mats[{mat, first[blk - 1]}].push_back({i - 1, j - 1, v});
    }
  }
  for (auto& [key, entries] : mats) {
    const int atom = p.AddAtom(key.second, std::move(entries));
    if (key.first == 0) {
      p.AddObjectiveAtom(atom, -1.0);
    } else {
      p.AddAtomCoefficient(key.first - 1, atom, 1.0);
    }
  }
  if (layout) *layout = std::move(local);
  return p;
}

std::string WriteSdpaSolution(const ConicProgram& p, const ConicSolution& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int r = 0; r < p.num_rows(); ++r) {
    out << (s.y.size() == p.num_rows() ? -s.y(r) : 0.0)
        << (r + 1 < p.num_rows() ? " " : "");
  }
  out << "\n";
  const int nb = p.num_blocks();
  auto dump = [&](int mat, const std::vector<Eigen::MatrixXd>& M) {
    for (int b = 0; b < static_cast<int>(M.size()) && b < nb; ++b) {
      for (int i = 0; i < M[b].rows(); ++i) {
        for (int j = i; j < M[b].cols(); ++j) {
          if (M[b](i, j) != 0.0) {
            out << mat << " " << b + 1 << " " << i + 1 << " " << j + 1 << " "
                << M[b](i, j) << "\n";
          }
        }
      }
    }
  };
  dump(1, s.Z);
  dump(2, s.X);
  if (p.num_free() > 0 && s.w.size() == p.num_free()) {
    for (int f = 0; f < p.num_free(); ++f) {
      const double wp = std::max(s.w(f), 0.0), wm = std::max(-s.w(f), 0.0);
      if (wp != 0.0) out << "2 " << nb + 1 << " " << 2 * f + 1 << " " << 2 * f + 1 << " " << wp << "\n";
      if (wm != 0.0) out << "2 " << nb + 1 << " " << 2 * f + 2 << " " << 2 * f + 2 << " " << wm << "\n";
    }
  }
  return out.str();
}

std::string WriteSdpaSolution(const ConicProgram& p, const ConicSolution& s,
                              const SdpaLayout& layout) {
  if (static_cast<int>(layout.sdpa_block.size()) != p.num_blocks()) {
    throw std::invalid_argument("layout does not match program");
  }
  std::ostringstream out;
  out << std::setprecision(17);
  for (int r = 0; r < p.num_rows(); ++r) {
    out << (s.y.size() == p.num_rows() ? -s.y(r) : 0.0)
        << (r + 1 < p.num_rows() ? " " : "");
  }
  out << "\n";
  auto dump = [&](int mat, const std::vector<Eigen::MatrixXd>& M) {
    for (int b = 0; b < static_cast<int>(M.size()) && b < p.num_blocks(); ++b) {
      const int blk = layout.sdpa_block[b];
      for (int i = 0; i < M[b].rows(); ++i) {
        for (int j = i; j < M[b].cols(); ++j) {
          if (M[b](i, j) == 0.0) continue;
          const int ii = layout.lp_index[b] ? layout.lp_index[b] : i + 1;
          const int jj = layout.lp_index[b] ? layout.lp_index[b] : j + 1;
          out << mat << " " << blk << " " << ii << " " << jj << " "
              << M[b](i, j) << "\n";
        }
      }
    }
  };
  dump(1, s.Z);
  dump(2, s.X);
  return out.str();
}

ConicSolution ReadSdpaSolution(const ConicProgram& p, const std::string& text) {
  std::istringstream in(text);
  ConicSolution s;
  const int nb = p.num_blocks();
  s.y = Eigen::VectorXd::Zero(p.num_rows());
  {
    std::istringstream ls(Clean(NextDataLine(in)));
    for (int r = 0; r < p.num_rows(); ++r) {
      double v;
      if (!(ls >> v)) throw std::runtime_error("short dual vector");
      s.y(r) = -v;
    }
  }
  s.X.resize(nb);
  s.Z.resize(nb);
  for (int b = 0; b < nb; ++b) {
    s.X[b] = Eigen::MatrixXd::Zero(p.block_dim(b), p.block_dim(b));
    s.Z[b] = s.X[b];
  }
  s.w = Eigen::VectorXd::Zero(p.num_free());
  std::string line;
  while (std::getline(in, line)) {
    const auto b0 = line.find_first_not_of(" \t\r");
    if (b0 == std::string::npos) continue;
    std::istringstream ls(Clean(line));
    int mat, blk, i, j;
    double v;
    if (!(ls >> mat >> blk >> i >> j >> v)) {
      throw std::runtime_error("bad solution entry: " + line);
    }
    if (mat != 1 && mat != 2) throw std::runtime_error("bad matrix id: " + line);
    if (blk == nb + 1 && p.num_free() > 0) {
      if (mat == 2 && i == j && i >= 1 && i <= 2 * p.num_free()) {
        s.w((i - 1) / 2) += (i % 2 == 1 ? v : -v);
      }
      continue;
    }
    if (blk < 1 || blk > nb || i < 1 || j < 1 || i > p.block_dim(blk - 1) ||
        j > p.block_dim(blk - 1)) {
      throw std::runtime_error("solution entry out of range: " + line);
    }
    Eigen::MatrixXd& M = mat == 1 ? s.Z[blk - 1] : s.X[blk - 1];
    M(i - 1, j - 1) = v;
    M(j - 1, i - 1) = v;
  }
  return s;
}

}  // namespace ddccm
