#include "ddccm/cli/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ddccm/controller/controller.h"
#include "ddccm/data/consistency_set.h"
#include "ddccm/dualprog/synthesis.h"
#include "ddccm/sim/simulate.h"
#include "ddccm/verify/verify.h"

namespace ddccm {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string OutPath(const PipelineConfig& c, const std::string& file) {
  fs::create_directories(c.output_dir);
  return (fs::path(c.output_dir) / file).string();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

/// Provenance fields shared by every JSON artifact.
Json Envelope(const PipelineConfig& c, const std::string& format) {
  return Json{{"format", format},
              {"config_hash", ConfigHash(c)},
              {"seed", c.seed},
              {"config", Json::parse(ConfigToJson(c, -1))}};
}

/// Provenance comment lines for CSV artifacts.
std::string CsvProvenance(const PipelineConfig& c) {
  return "# config_hash: " + ConfigHash(c) + "\n# seed: " +
         std::to_string(c.seed) + "\n# config: " + ConfigToJson(c, -1) + "\n";
}

std::string CertificatePath(const PipelineConfig& c) {
  return (fs::path(c.output_dir) / "certificate.json").string();
}

Certificate RequireCertificate(const PipelineConfig& c) {
  const auto cert = LoadCertificateArtifact(CertificatePath(c));
  if (!cert) {
    throw std::runtime_error("synthesis found no certificate; nothing to use");
  }
  return *cert;
}

Json SizesJson(const SizeReport& s) {
  return Json{{"n", s.n},
              {"q", s.q},
              {"T", s.T},
              {"L", s.L},
              {"w_gram_nominal", s.w_gram_nominal},
              {"w_gram_effective", s.w_gram_effective},
              {"num_multipliers", s.num_multipliers},
              {"multiplier_gram_dim", s.multiplier_gram_dim},
              {"positivity_gram_dim", s.positivity_gram_dim},
              {"region_gram_dim", s.region_gram_dim},
              {"rho_terms", s.rho_terms},
              {"num_rows", s.num_rows},
              {"num_blocks", s.num_blocks}};
}

std::string Status(ProbeOutcome o) { return ToString(o); }

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '&') out += "&amp;";
    else if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else out += ch;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& CommandNames() {
  static const std::vector<std::string> kNames{
      "generate", "synth", "verify", "simulate", "geodesic", "report"};
  return kNames;
}

SampleSet PipelineDataset(const PipelineConfig& c) {
  if (!c.data_path.empty()) {
    LoadOptions o;
    o.finite_difference = c.finite_difference;
    o.dict = c.dict;
    o.G = c.G;
    o.eps = c.eps.value_or(-1.0);
    return LoadSamples(c.data_path, o);
  }
  const auto plant = c.TruePlant();
  if (!plant) {
    throw ConfigError("no data file and no true plant to generate data from");
  }
  SampleSet s = GenerateDataset(*plant, c.Dataset());
  if (c.eps) s.eps = *c.eps;
  return s;
}

std::optional<Certificate> LoadCertificateArtifact(const std::string& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed " + path + ": " + e.what());
  }
  if (!j.contains("certificate")) {
    throw std::runtime_error(path + " is not a synthesis artifact");
  }
  if (j["certificate"].is_null()) return std::nullopt;
  return CertificateFromJson(j["certificate"].dump());
}

ClosedLoopRun SimulateClosedLoop(const PolynomialPlant& plant,
                                const Certificate& cert,
                                const Eigen::VectorXd& x0,
                                const ClosedLoopOptions& options) {
  ClosedLoopRun run;
  run.x0 = x0;
  GeodesicOptions go;
  go.segments = options.segments;
  GeodesicController ctl(cert, go);
  std::vector<double> d;
  const Controller u = [&](double, const Eigen::VectorXd& x) {
    const Eigen::VectorXd v = ctl(x);
    d.push_back(std::sqrt(std::max(0.0, ctl.last_path().energy)));
    return v;
  };
  IntegrateOptions io;
  io.h = options.step;
  io.hold_control = true;
  try {
    run.traj = Integrate(plant, u, x0, options.horizon, io);
  } catch (const std::exception& e) {
    run.error = e.what();
    return run;
  }
  run.diverged = run.traj.diverged;
  run.geodesic_warnings = ctl.warnings();
  run.max_solve_time = ctl.max_solve_time();
  // The last pass of controller calls is at the recorded states, in order.
  const size_t K = run.traj.t.size();
  run.distance.assign(d.end() - static_cast<std::ptrdiff_t>(K), d.end());
  const double d0 = run.distance.front();
  for (size_t k = 0; k < K; ++k) {
    const double dec = std::log(d0) - std::log(run.distance[k]);
    run.decrease_margin =
        std::min(run.decrease_margin, dec - (cert.lambda * run.traj.t[k] - 0.5));
  }
  run.final_norm_ratio = run.traj.x.back().norm() / x0.norm();
  for (const auto& x : run.traj.x) {
    run.max_abs_state = std::max(run.max_abs_state, x.cwiseAbs().maxCoeff());
  }
  return run;
}

CommandResult RunGenerate(const PipelineConfig& c, std::ostream& log) {
  const SampleSet s = PipelineDataset(c);
  const std::string path = OutPath(c, "data.csv");
  WriteFile(path, CsvProvenance(c) + FormatSamples(s));
  log << "generate: " << s.num_samples() << " samples, eps " << s.eps
      << " -> " << path << std::endl;
  return {0, {path}};
}

CommandResult RunSynth(const PipelineConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const ConsistencySet set(PipelineDataset(c));
  const SynthesisResult r = BisectLambda(set, c.Synthesis());
  const double wall = Seconds(start);

  Json probes = Json::array();
  for (const auto& p : r.probes) {
    probes.push_back(Json{{"lambda", p.lambda},
                          {"outcome", Status(p.outcome)},
                          {"optimal_t", p.optimal_t},
                          {"dual_bound", p.dual_bound},
                          {"iterations", p.iterations},
                          {"message", p.message}});
    log << "  probe lambda " << p.lambda << ": " << Status(p.outcome)
        << " t* " << p.optimal_t << " (" << Fixed(p.wall_time, 2) << " s)\n";
  }
  Json j = Envelope(c, "ddccm-synthesis");
  j["status"] = Status(r.outcome);
  j["lambda"] = r.certificate ? Json(r.certificate->lambda) : Json();
  j["extraction_error"] = r.extraction_error;
  j["sizes"] = SizesJson(r.sizes);
  j["probes"] = probes;
  j["certificate"] =
      r.certificate ? Json::parse(CertificateToJson(*r.certificate)) : Json();
  const std::string path = OutPath(c, "certificate.json");
  WriteFile(path, j.dump(1) + "\n");
  log << "synth: " << Status(r.outcome);
  if (r.certificate) log << " at lambda " << r.certificate->lambda;
  if (!r.extraction_error.empty()) log << " (" << r.extraction_error << ")";
  log << ", wall time " << Fixed(wall, 2) << " s -> " << path << "\n";
  return {0, {path}};
}

CommandResult RunVerify(const PipelineConfig& c, std::ostream& log) {
  const auto cert = LoadCertificateArtifact(CertificatePath(c));
  if (!cert) {
    log << "verify: no certificate to verify (synthesis infeasible)\n";
    return {1, {}};
  }
  const auto start = std::chrono::steady_clock::now();
  const ConsistencySet set(PipelineDataset(c));
  const VerificationReport r = Verify(*cert, set, c.Verification());
  Json j = Envelope(c, "ddccm-verification-artifact");
  j["report"] = Json::parse(ReportToJson(r));
  const std::string json_path = OutPath(c, "verification.json");
  const std::string text_path = OutPath(c, "verification.txt");
  WriteFile(json_path, j.dump(1) + "\n");
  WriteFile(text_path, "config_hash " + ConfigHash(c) + "\nseed " +
                           std::to_string(c.seed) + "\n" + ReportToText(r));
  log << "verify: " << (r.pass ? "PASS" : "FAIL") << " ("
      << r.plants_checked << " plants, " << r.grid_points << " grid points, "
      << Fixed(Seconds(start), 2) << " s) -> " << json_path << "\n";
  return {r.pass ? 0 : 1, {json_path, text_path}};
}

CommandResult RunSimulate(const PipelineConfig& c, std::ostream& log) {
  const auto plant = c.TruePlant();
  if (!plant) throw ConfigError("simulate needs the true plant F_true");
  const Certificate cert = RequireCertificate(c);
  const int n = c.n();
  std::seed_seq seq{static_cast<std::uint64_t>(c.seed), std::uint64_t{2}};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(-c.sim_box, c.sim_box);

  std::ostringstream csv;
  csv << std::setprecision(17) << CsvProvenance(c) << "traj,t";
  for (int k = 1; k <= n; ++k) csv << ",x" << k;
  for (int k = 1; k <= plant->m(); ++k) csv << ",u" << k;
  csv << ",distance\n";
  Json runs = Json::array();
  std::vector<Series> states, distances;
  double max_solve = 0.0;
  for (int i = 0; i < c.initial_conditions; ++i) {
    Eigen::VectorXd x0(n);
    for (int k = 0; k < n; ++k) x0(k) = unif(rng);
    const ClosedLoopRun run =
        SimulateClosedLoop(*plant, cert, x0, {c.sim_horizon, c.sim_step,
                                              c.geodesic_segments});
    max_solve = std::max(max_solve, run.max_solve_time);
    Json r{{"x0", std::vector<double>(x0.data(), x0.data() + n)},
           {"error", run.error}};
    if (run.error.empty()) {
      const Trajectory& tr = run.traj;
      Series dist{"x0 #" + std::to_string(i + 1), {}, {}};
      for (size_t k = 0; k < tr.t.size(); ++k) {
        csv << i << "," << tr.t[k];
        for (int j = 0; j < n; ++j) csv << "," << tr.x[k](j);
        for (int j = 0; j < tr.u[k].size(); ++j) csv << "," << tr.u[k](j);
        csv << "," << run.distance[k] << "\n";
        dist.x.push_back(tr.t[k]);
        dist.y.push_back(std::log(run.distance[k]));
      }
      for (int j = 0; j < n; ++j) {
        Series s{"#" + std::to_string(i + 1) + " x" + std::to_string(j + 1),
                 tr.t, {}};
        for (const auto& x : tr.x) s.y.push_back(x(j));
        states.push_back(std::move(s));
      }
      distances.push_back(std::move(dist));
      r["diverged"] = run.diverged;
      r["final_norm_ratio"] = run.final_norm_ratio;
      r["initial_distance"] = run.distance.front();
      r["final_distance"] = run.distance.back();
      r["decrease_margin"] = run.decrease_margin;
      r["max_abs_state"] = run.max_abs_state;
      r["geodesic_warnings"] = run.geodesic_warnings;
    }
    runs.push_back(r);
  }
  Json j = Envelope(c, "ddccm-simulation");
  j["lambda"] = cert.lambda;
  j["horizon"] = c.sim_horizon;
  j["trajectories"] = runs;
  const std::string csv_path = OutPath(c, "closed_loop.csv");
  const std::string json_path = OutPath(c, "simulation.json");
  const std::string states_svg = OutPath(c, "closed_loop.svg");
  const std::string dist_svg = OutPath(c, "distance.svg");
  WriteFile(csv_path, csv.str());
  WriteFile(json_path, j.dump(1) + "\n");
  WriteFile(states_svg, LineChartSvg("Closed-loop states", "t", "x", states));
  WriteFile(dist_svg, LineChartSvg("Riemannian distance to the origin", "t",
                                   "log d", distances));
  log << "simulate: " << c.initial_conditions
      << " closed-loop runs, slowest geodesic " << Fixed(max_solve, 3)
      << " s -> " << csv_path << "\n";
  return {0, {csv_path, json_path, states_svg, dist_svg}};
}

CommandResult RunGeodesic(const PipelineConfig& c, std::ostream& log) {
  const Certificate cert = RequireCertificate(c);
  const Eigen::VectorXd target =
      c.geodesic_target.value_or(Eigen::VectorXd::Ones(c.n()));
  GeodesicOptions o;
  o.segments = c.geodesic_segments;
  const auto start = std::chrono::steady_clock::now();
  const GeodesicPath path = Geodesic(CertificateMetric(cert), target, o);
  std::ostringstream csv;
  csv << CsvProvenance(c) << "# energy: " << std::setprecision(17)
      << path.energy << "\n";
  WriteGeodesicCsv(path, csv);
  const std::string out = OutPath(c, "geodesic.csv");
  WriteFile(out, csv.str());
  log << "geodesic: energy " << path.energy << " (straight line "
      << path.straight_energy << "), " << path.iterations << " iterations, "
      << Fixed(Seconds(start), 3) << " s"
      << (path.warning.empty() ? "" : ", " + path.warning) << " -> " << out
      << "\n";
  return {0, {out}};
}

CommandResult RunReport(const std::vector<PipelineConfig>& configs,
                        const std::string& output_dir, std::ostream& log) {
  CommandResult result;
  Json examples = Json::array();
  std::ostringstream text;
  text << "ddccm report\n";
  for (PipelineConfig c : configs) {
    const std::string name = c.example.empty() ? "custom" : c.example;
    c.output_dir = (fs::path(output_dir) / name).string();
    log << "== " << name << std::endl;
    Json e{{"name", name}, {"config_hash", ConfigHash(c)}, {"seed", c.seed}};
    auto append = [&](const CommandResult& r) {
      result.artifacts.insert(result.artifacts.end(), r.artifacts.begin(),
                              r.artifacts.end());
      return r.exit_code;
    };
    if (c.TruePlant() || !c.data_path.empty()) append(RunGenerate(c, log));
    append(RunSynth(c, log));
    const Json synth = Json::parse(ReadFile(CertificatePath(c)));
    e["status"] = synth["status"];
    e["lambda"] = synth["lambda"];
    text << name << ": synthesis " << synth["status"].get<std::string>();
    if (!synth["lambda"].is_null()) {
      text << " at lambda " << synth["lambda"].get<double>();
    }
    if (synth["certificate"].is_null()) {
      e["verification"] = nullptr;
      text << "\n";
    } else {
      const int code = append(RunVerify(c, log));
      e["verification"] = code == 0 ? "pass" : "fail";
      text << ", verification " << (code == 0 ? "pass" : "fail");
      if (code != 0) result.exit_code = 1;
      if (c.TruePlant()) {
        append(RunSimulate(c, log));
        const Json sim =
            Json::parse(ReadFile((fs::path(c.output_dir) / "simulation.json").string()));
        double worst_ratio = 0.0;
        double worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& r : sim["trajectories"]) {
          if (!r["error"].get<std::string>().empty()) continue;
          worst_ratio = std::max(worst_ratio, r["final_norm_ratio"].get<double>());
          worst_margin = std::min(worst_margin, r["decrease_margin"].get<double>());
        }
        e["worst_final_norm_ratio"] = worst_ratio;
        e["worst_decrease_margin"] = worst_margin;
        text << ", worst |x(T)|/|x0| " << Fixed(worst_ratio, 4)
             << ", worst distance-decrease margin " << Fixed(worst_margin, 3);
      }
      text << "\n";
    }
    examples.push_back(e);
  }
  fs::create_directories(output_dir);
  const std::string json_path = (fs::path(output_dir) / "report.json").string();
  const std::string text_path = (fs::path(output_dir) / "report.txt").string();
  WriteFile(json_path,
            Json{{"format", "ddccm-report"}, {"examples", examples}}.dump(1) + "\n");
  WriteFile(text_path, text.str());
  result.artifacts.push_back(json_path);
  result.artifacts.push_back(text_path);
  log << text.str();
  return result;
}

CommandResult RunCommand(const std::string& command, const PipelineConfig& c,
                         std::ostream& log) {
  if (command == "generate") return RunGenerate(c, log);
  if (command == "synth") return RunSynth(c, log);
  if (command == "verify") return RunVerify(c, log);
  if (command == "simulate") return RunSimulate(c, log);
  if (command == "geodesic") return RunGeodesic(c, log);
  if (command == "report") return RunReport({c}, c.output_dir, log);
  throw std::invalid_argument("unknown command: " + command);
}

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 40,
                   kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                  "#bcbd22", "#17becf"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
    << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\">"
    << Escape(title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
    << kW - kLeft - kRight << "\" height=\"" << kH - kTop - kBottom
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft << "\" y=\"" << kH - kBottom + 15 << "\">"
    << Fixed(x0, 3) << "</text>\n";
  o << "<text x=\"" << kW - kRight << "\" y=\"" << kH - kBottom + 15
    << "\" text-anchor=\"end\">" << Fixed(x1, 3) << "</text>\n";
  o << "<text x=\"" << kLeft - 5 << "\" y=\"" << kH - kBottom
    << "\" text-anchor=\"end\">" << Fixed(y0, 3) << "</text>\n";
  o << "<text x=\"" << kLeft - 5 << "\" y=\"" << kTop + 10
    << "\" text-anchor=\"end\">" << Fixed(y1, 3) << "</text>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\">" << Escape(x_label) << "</text>\n";
  o << "<text x=\"15\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 15 "
    << kH / 2 << ")\" text-anchor=\"middle\">" << Escape(y_label) << "</text>\n";
  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    o << "<polyline fill=\"none\" stroke=\"" << kColors[i % 10]
      << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      o << (first ? "" : " ") << Fixed(px(s.x[k]), 2) << ","
        << Fixed(py(s.y[k]), 2);
      first = false;
    }
    o << "\"><title>" << Escape(s.name) << "</title></polyline>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ddccm
