#include "ddccm/data/samples.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ddccm {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double ParseNumber(const std::string& cell, int line_no) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": not a number: '" + cell + "'");
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": non-finite value");
  }
  return v;
}

// Counts columns named prefix1, prefix2, ... starting at `pos`.
int CountBlock(const std::vector<std::string>& header, size_t pos,
               const std::string& prefix) {
  int count = 0;
  while (pos + count < header.size() &&
         header[pos + count] == prefix + std::to_string(count + 1)) {
    ++count;
  }
  return count;
}

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::runtime_error("G must be a non-empty list of rows");
  }
  Eigen::MatrixXd M(j.size(), j[0].size());
  for (size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size()) throw std::runtime_error("ragged G");
    for (size_t c = 0; c < j[r].size(); ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

MonomialDictionary DictionaryFromJson(const nlohmann::json& j) {
  std::vector<Monomial> mons;
  for (const auto& e : j) mons.emplace_back(e.get<std::vector<int>>());
  return MonomialDictionary(std::move(mons));
}

}  // namespace

void SampleSet::Validate() const {
  const int n = num_states(), m = num_inputs();
  if (n == 0) throw std::invalid_argument("G must have at least one row");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (records.empty()) throw std::invalid_argument("no samples");
  if (dict.size() == 0 || dict.num_vars() != n) {
    throw std::invalid_argument("dictionary must be in the state variables");
  }
  for (const auto& r : records) {
    if (r.x.size() != n || r.xdot.size() != n || r.u.size() != m) {
      throw std::invalid_argument("record dimensions disagree with G");
    }
    if (!r.x.allFinite() || !r.xdot.allFinite() || !r.u.allFinite()) {
      throw std::invalid_argument("non-finite sample");
    }
  }
}

SampleSet ParseSamples(const std::string& text, const LoadOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto colon = t.find(':');
      if (colon != std::string::npos) {
        meta[Trim(t.substr(1, colon - 1))] = Trim(t.substr(colon + 1));
      }
      continue;
    }
    header = SplitCsv(t);
    break;
  }
  if (header.size() < 3 || header[0] != "traj" || header[1] != "t") {
    throw std::runtime_error("header must start with 'traj,t'");
  }
  const int n = CountBlock(header, 2, "x");
  const int nd = CountBlock(header, 2 + n, "xdot");
  const int m = CountBlock(header, 2 + n + nd, "u");
  if (n == 0 || (nd != 0 && nd != n) ||
      header.size() != static_cast<size_t>(2 + n + nd + m)) {
    throw std::runtime_error("header does not match traj,t,x1..xn,"
                             "[xdot1..xdotn,]u1..um");
  }

  SampleSet s;
  try {
    s.dict = meta.count("dictionary")
                 ? DictionaryFromJson(nlohmann::json::parse(meta["dictionary"]))
                 : options.dict;
    s.G = meta.count("G") ? MatrixFromJson(nlohmann::json::parse(meta["G"]))
                          : options.G;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad header metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad dictionary: ") + e.what());
  }
  if (s.G.size() == 0 && m == 0) s.G = Eigen::MatrixXd::Zero(n, 0);
  if (s.G.rows() != n || s.G.cols() != m) {
    throw std::runtime_error("G must be " + std::to_string(n) + " x " +
                             std::to_string(m));
  }

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = SplitCsv(t);
    if (cells.size() != header.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " columns, got " + std::to_string(cells.size()));
    }
    SampleRecord r;
    const double traj = ParseNumber(cells[0], line_no);
    if (traj != std::floor(traj)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": traj must be an integer");
    }
    r.traj = static_cast<int>(traj);
    r.t = ParseNumber(cells[1], line_no);
    r.x.resize(n);
    r.xdot = Eigen::VectorXd::Zero(n);
    r.u.resize(m);
    for (int k = 0; k < n; ++k) r.x(k) = ParseNumber(cells[2 + k], line_no);
    for (int k = 0; k < nd; ++k) {
      r.xdot(k) = ParseNumber(cells[2 + n + k], line_no);
    }
    for (int k = 0; k < m; ++k) {
      r.u(k) = ParseNumber(cells[2 + n + nd + k], line_no);
    }
    s.records.push_back(std::move(r));
  }
  if (s.records.empty()) throw std::runtime_error("no data rows");
  if (nd == 0) {
    if (!options.finite_difference) {
      throw std::runtime_error(
          "file has no xdot columns and finite differencing is off");
    }
    s.records = FiniteDifferenceDerivatives(std::move(s.records));
  }

  if (options.eps >= 0.0) {
    s.eps = options.eps;
  } else if (meta.count("eps")) {
    s.eps = ParseNumber(meta["eps"], 0);
  } else {
    s.eps = EstimateNoiseBound(s.records);
  }
  try {
    s.Validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  return s;
}

SampleSet LoadSamples(const std::string& path, const LoadOptions& options) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return ParseSamples(buf.str(), options);
}

std::string FormatSamples(const SampleSet& s) {
  s.Validate();
  const int n = s.num_states(), m = s.num_inputs();
  std::ostringstream out;
  out << std::setprecision(17);
  nlohmann::json dict = nlohmann::json::array();
  for (const auto& mon : s.dict.entries()) dict.push_back(mon.exponents());
  nlohmann::json G = nlohmann::json::array();
  for (int r = 0; r < n; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m; ++c) row.push_back(s.G(r, c));
    G.push_back(row);
  }
  out << "# dictionary: " << dict.dump() << "\n";
  out << "# G: " << G.dump() << "\n";
  out << "# eps: " << s.eps << "\n";
  out << "traj,t";
  for (int k = 1; k <= n; ++k) out << ",x" << k;
  for (int k = 1; k <= n; ++k) out << ",xdot" << k;
  for (int k = 1; k <= m; ++k) out << ",u" << k;
  out << "\n";
  for (const auto& r : s.records) {
    out << r.traj << "," << r.t;
    for (int k = 0; k < n; ++k) out << "," << r.x(k);
    for (int k = 0; k < n; ++k) out << "," << r.xdot(k);
    for (int k = 0; k < m; ++k) out << "," << r.u(k);
    out << "\n";
  }
  return out.str();
}

void SaveSamples(const SampleSet& samples, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << FormatSamples(samples);
}

std::vector<SampleRecord> FiniteDifferenceDerivatives(
    std::vector<SampleRecord> records) {
  size_t begin = 0;
  while (begin < records.size()) {
    size_t end = begin + 1;
    while (end < records.size() && records[end].traj == records[begin].traj) {
      ++end;
    }
    const size_t count = end - begin;
    if (count < 3) {
      throw std::invalid_argument("trajectory " +
                                  std::to_string(records[begin].traj) +
                                  " has fewer than 3 samples");
    }
    for (size_t i = begin + 1; i < end; ++i) {
      if (!(records[i].t > records[i - 1].t)) {
        throw std::invalid_argument("non-monotone timestamps in trajectory " +
                                    std::to_string(records[begin].traj));
      }
    }
    // Three-point Lagrange derivative at t_j using (t_a, t_b, t_c).
    auto lagrange = [&](size_t j, size_t a, size_t b, size_t c) {
      const double t = records[j].t, ta = records[a].t, tb = records[b].t,
                   tc = records[c].t;
      const double wa = ((t - tb) + (t - tc)) / ((ta - tb) * (ta - tc));
      const double wb = ((t - ta) + (t - tc)) / ((tb - ta) * (tb - tc));
      const double wc = ((t - ta) + (t - tb)) / ((tc - ta) * (tc - tb));
      return Eigen::VectorXd(wa * records[a].x + wb * records[b].x +
                             wc * records[c].x);
    };
    for (size_t j = begin; j < end; ++j) {
      if (j == begin) {
        records[j].xdot = lagrange(j, j, j + 1, j + 2);
      } else if (j + 1 == end) {
        records[j].xdot = lagrange(j, j - 2, j - 1, j);
      } else {
        records[j].xdot = lagrange(j, j - 1, j, j + 1);
      }
    }
    begin = end;
  }
  return records;
}

double EstimateNoiseBound(const std::vector<SampleRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no samples");
  double mx = 0.0;
  for (const auto& r : records) {
    if (r.xdot.size() > 0) mx = std::max(mx, r.xdot.cwiseAbs().maxCoeff());
  }
  return mx / 15.0;
}

}  // namespace ddccm
