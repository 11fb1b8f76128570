#include "ddccm/cli/config.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddccm/dualprog/dual_program.h"
#include "ddccm/sim/examples.h"

namespace ddccm {

namespace {

using Json = nlohmann::ordered_json;

Json MatrixJson(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (int r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd MatrixFrom(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError(std::string(what) + " must be a non-empty list of rows");
  }
  Eigen::MatrixXd M(j.size(), j[0].size());
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) {
      throw ConfigError(std::string(what) + " has ragged rows");
    }
    for (size_t c = 0; c < j[r].size(); ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

Json DictionaryJson(const MonomialDictionary& dict) {
  Json d = Json::array();
  for (const auto& m : dict.entries()) d.push_back(m.exponents());
  return d;
}

MonomialDictionary DictionaryFrom(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("dictionary must be a non-empty list of exponent vectors");
  }
  std::vector<Monomial> mons;
  for (const auto& e : j) mons.emplace_back(e.get<std::vector<int>>());
  try {
    return MonomialDictionary(std::move(mons));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad dictionary: ") + e.what());
  }
}

template <typename T>
void Read(const Json& obj, const char* key, T* value) {
  if (obj.contains(key) && !obj.at(key).is_null()) *value = obj.at(key).get<T>();
}

const Json& Section(const Json& j, const char* key) {
  static const Json kEmpty = Json::object();
  if (!j.contains(key)) return kEmpty;
  if (!j.at(key).is_object()) {
    throw ConfigError(std::string("section '") + key + "' must be an object");
  }
  return j.at(key);
}

}  // namespace

std::optional<PolynomialPlant> PipelineConfig::TruePlant() const {
  if (!F_true) return std::nullopt;
  return PolynomialPlant{*F_true, dict, G};
}

void PipelineConfig::Validate() const {
  if (dict.size() == 0) throw ConfigError("dictionary is empty");
  if (G.rows() == 0) throw ConfigError("G has no rows");
  if (dict.num_vars() != n()) {
    throw ConfigError("dictionary variables do not match the rows of G");
  }
  if (F_true && (F_true->rows() != n() || F_true->cols() != dict.size())) {
    throw ConfigError("F_true must be n x L");
  }
  if (!data_path.empty() && !std::filesystem::exists(data_path)) {
    throw ConfigError("data file does not exist: " + data_path);
  }
  if (output_dir.empty()) throw ConfigError("output directory is empty");
  if (eps && !(*eps >= 0.0)) throw ConfigError("eps must be non-negative");
  if (trajectories < 1 || samples_per_trajectory < 2 || !(data_horizon > 0.0) ||
      !(data_box > 0.0)) {
    throw ConfigError("invalid data generation settings");
  }
  if (deg_w != 0 && deg_w != 2) throw ConfigError("W degree must be 0 or 2");
  const int min_mu = MinimumMultiplierDegree(dict.max_degree(), deg_w / 2);
  if (deg_mu_x >= 0 && deg_mu_x < min_mu) {
    throw ConfigError("multiplier degree " + std::to_string(deg_mu_x) +
                      " is below the minimum " + std::to_string(min_mu));
  }
  if (deg_rho < -1) throw ConfigError("rho degree must be >= -1");
  if (!(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo)) {
    throw ConfigError("lambda range must satisfy 0 < lo <= hi");
  }
  if (lambda_iterations < 0 || !(margin >= 0.0) || !(region_radius >= 0.0)) {
    throw ConfigError("invalid synthesis settings");
  }
  if (plant_samples < 0 || grid_per_axis < 1 || !(verify_box > 0.0) ||
      dual_points < 0) {
    throw ConfigError("invalid verification settings");
  }
  if (initial_conditions < 1 || !(sim_box > 0.0) || !(sim_horizon > 0.0) ||
      !(sim_step > 0.0)) {
    throw ConfigError("invalid simulation settings");
  }
  if (geodesic_segments < 2) throw ConfigError("geodesic needs >= 2 segments");
  if (geodesic_target && geodesic_target->size() != n()) {
    throw ConfigError("geodesic target must have n entries");
  }
}

DatasetOptions PipelineConfig::Dataset() const {
  DatasetOptions d;
  d.num_trajectories = trajectories;
  d.samples_per_trajectory = samples_per_trajectory;
  d.horizon = data_horizon;
  d.box = data_box;
  d.noise = noise;
  d.seed = seed;
  return d;
}

SynthesisOptions PipelineConfig::Synthesis() const {
  SynthesisOptions o;
  o.program.deg_w = deg_w;
  o.program.deg_mu_x = deg_mu_x;
  o.program.deg_rho = deg_rho;
  o.program.margin = margin;
  o.program.region_radius = region_radius;
  o.program.facial_reduction = facial_reduction;
  o.lambda_lo = lambda_lo;
  o.lambda_hi = lambda_hi;
  o.max_iterations = lambda_iterations;
  o.recenter = recenter;
  return o;
}

VerifyOptions PipelineConfig::Verification() const {
  VerifyOptions o;
  o.plant_samples = plant_samples;
  o.grid_per_axis = grid_per_axis;
  o.box = verify_box;
  o.dual_points = dual_points;
  o.seed = seed;
  o.F_true = F_true;
  return o;
}

PipelineConfig ExampleConfig(const std::string& name) {
  const PolynomialPlant p = ExamplePlant(name);
  PipelineConfig c;
  c.example = name;
  c.dict = p.dict;
  c.G = p.G;
  c.F_true = p.F;
  c.output_dir = "out/" + name;
  if (name == "nonlinear3d") {
    // One probe takes minutes; contraction is certified on the box only.
    c.deg_w = 2;
    c.lambda_lo = c.lambda_hi = 0.1;
    c.lambda_iterations = 0;
    c.region_radius = 1.5;
    c.plant_samples = 100;
    c.grid_per_axis = 5;
    c.verify_box = 1.5;
    // The geodesic feedback is high-gain (fast closed-loop pole near -84 at
    // the origin), so the hold period must stay well below 2 / 84.
    c.sim_step = 0.002;
  }
  return c;
}

std::string ConfigToJson(const PipelineConfig& c, int indent) {
  Json target = nullptr;
  if (c.geodesic_target) {
    target = std::vector<double>(c.geodesic_target->data(),
                                 c.geodesic_target->data() +
                                     c.geodesic_target->size());
  }
  const Json j{
      {"schema", "ddccm-config"},
      {"version", PipelineConfig::kVersion},
      {"example", c.example},
      {"seed", c.seed},
      {"paths", Json{{"data", c.data_path}, {"output_dir", c.output_dir}}},
      {"plant", Json{{"dictionary", DictionaryJson(c.dict)},
                     {"G", MatrixJson(c.G)},
                     {"F_true", c.F_true ? MatrixJson(*c.F_true) : Json()}}},
      {"data", Json{{"eps", c.eps ? Json(*c.eps) : Json("auto")},
                    {"finite_difference", c.finite_difference},
                    {"trajectories", c.trajectories},
                    {"samples_per_trajectory", c.samples_per_trajectory},
                    {"horizon", c.data_horizon},
                    {"box", c.data_box},
                    {"noise", c.noise}}},
      {"synthesis", Json{{"deg_w", c.deg_w},
                         {"deg_mu_x", c.deg_mu_x},
                         {"deg_rho", c.deg_rho},
                         {"lambda_range", {c.lambda_lo, c.lambda_hi}},
                         {"lambda_iterations", c.lambda_iterations},
                         {"margin", c.margin},
                         {"region_radius", c.region_radius},
                         {"facial_reduction", c.facial_reduction},
                         {"recenter", c.recenter}}},
      {"verification", Json{{"plant_samples", c.plant_samples},
                            {"grid_per_axis", c.grid_per_axis},
                            {"box", c.verify_box},
                            {"dual_points", c.dual_points}}},
      {"simulation", Json{{"initial_conditions", c.initial_conditions},
                          {"box", c.sim_box},
                          {"horizon", c.sim_horizon},
                          {"step", c.sim_step}}},
      {"geodesic", Json{{"segments", c.geodesic_segments}, {"target", target}}}};
  return j.dump(indent);
}

PipelineConfig ConfigFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  try {
    if (j.value("schema", std::string("ddccm-config")) != "ddccm-config") {
      throw ConfigError("not a ddccm-config document");
    }
    const int version = j.value("version", PipelineConfig::kVersion);
    if (version != PipelineConfig::kVersion) {
      throw ConfigError("unsupported config version " + std::to_string(version));
    }
    const std::string example = j.value("example", std::string());
    if (!example.empty()) {
      try {
        c = ExampleConfig(example);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    Read(j, "seed", &c.seed);
    const Json& paths = Section(j, "paths");
    Read(paths, "data", &c.data_path);
    Read(paths, "output_dir", &c.output_dir);

    const Json& plant = Section(j, "plant");
    if (plant.contains("dictionary")) c.dict = DictionaryFrom(plant["dictionary"]);
    if (plant.contains("G")) c.G = MatrixFrom(plant["G"], "G");
    if (plant.contains("F_true")) {
      if (plant["F_true"].is_null()) {
        c.F_true.reset();
      } else {
        c.F_true = MatrixFrom(plant["F_true"], "F_true");
      }
    }

    const Json& data = Section(j, "data");
    if (data.contains("eps")) {
      const Json& e = data["eps"];
      if (e.is_string()) {
        if (e.get<std::string>() != "auto") {
          throw ConfigError("eps must be a number or \"auto\"");
        }
        c.eps.reset();
      } else {
        c.eps = e.get<double>();
      }
    }
    Read(data, "finite_difference", &c.finite_difference);
    Read(data, "trajectories", &c.trajectories);
    Read(data, "samples_per_trajectory", &c.samples_per_trajectory);
    Read(data, "horizon", &c.data_horizon);
    Read(data, "box", &c.data_box);
    Read(data, "noise", &c.noise);

    const Json& s = Section(j, "synthesis");
    Read(s, "deg_w", &c.deg_w);
    Read(s, "deg_mu_x", &c.deg_mu_x);
    Read(s, "deg_rho", &c.deg_rho);
    if (s.contains("lambda_range")) {
      const auto range = s["lambda_range"].get<std::vector<double>>();
      if (range.size() != 2) throw ConfigError("lambda_range needs two values");
      c.lambda_lo = range[0];
      c.lambda_hi = range[1];
    }
    Read(s, "lambda_iterations", &c.lambda_iterations);
    Read(s, "margin", &c.margin);
    Read(s, "region_radius", &c.region_radius);
    Read(s, "facial_reduction", &c.facial_reduction);
    Read(s, "recenter", &c.recenter);

    const Json& v = Section(j, "verification");
    Read(v, "plant_samples", &c.plant_samples);
    Read(v, "grid_per_axis", &c.grid_per_axis);
    Read(v, "box", &c.verify_box);
    Read(v, "dual_points", &c.dual_points);

    const Json& sim = Section(j, "simulation");
    Read(sim, "initial_conditions", &c.initial_conditions);
    Read(sim, "box", &c.sim_box);
    Read(sim, "horizon", &c.sim_horizon);
    Read(sim, "step", &c.sim_step);

    const Json& g = Section(j, "geodesic");
    Read(g, "segments", &c.geodesic_segments);
    if (g.contains("target") && !g["target"].is_null()) {
      const auto t = g["target"].get<std::vector<double>>();
      c.geodesic_target = Eigen::Map<const Eigen::VectorXd>(
          t.data(), static_cast<Eigen::Index>(t.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config schema error: ") + e.what());
  }
  c.Validate();
  return c;
}

PipelineConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ConfigFromJson(text.str());
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ConfigHash(const PipelineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    Fnv1a64(ConfigToJson(config, -1))));
  return buf;
}

}  // namespace ddccm
