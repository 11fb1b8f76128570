#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddccm/cli/config.h"
#include "ddccm/cli/pipeline.h"
#include "ddccm/sim/examples.h"

using namespace ddccm;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string example;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string data_path;
  std::vector<double> target;
};

void AddCommonFlags(CLI::App* app, CommonFlags* f) {
  auto* cfg = app->add_option("-c,--config", f->config_path, "Pipeline config JSON")
                  ->check(CLI::ExistingFile);
  app->add_option("-e,--example", f->example, "Built-in example config")
      ->check(CLI::IsMember(ExampleNames()))
      ->excludes(cfg);
  app->add_option("--seed", f->seed, "Seed for all randomness (overrides config)");
  app->add_option("-o,--out", f->output_dir, "Output directory (overrides config)");
  app->add_option("--data", f->data_path, "Dataset CSV (overrides config)");
}

PipelineConfig Resolve(const CommonFlags& f) {
  PipelineConfig c;
  if (!f.config_path.empty()) {
    c = LoadConfig(f.config_path);
  } else if (!f.example.empty()) {
    c = ExampleConfig(f.example);
  } else {
    throw ConfigError("give --config or --example");
  }
  if (f.seed) c.seed = *f.seed;
  if (!f.output_dir.empty()) c.output_dir = f.output_dir;
  if (!f.data_path.empty()) c.data_path = f.data_path;
  if (!f.target.empty()) {
    c.geodesic_target = Eigen::Map<const Eigen::VectorXd>(
        f.target.data(), static_cast<Eigen::Index>(f.target.size()));
  }
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven control contraction metric synthesis pipeline"};
  app.require_subcommand(1);

  std::vector<std::pair<std::string, std::string>> commands{
      {"generate", "Generate a noisy open-loop dataset (data.csv)"},
      {"synth", "Synthesize a contraction certificate (certificate.json)"},
      {"verify", "Verify the certificate by sampling consistent plants"},
      {"simulate", "Simulate the closed loop under the geodesic controller"},
      {"geodesic", "Compute one geodesic from the origin (geodesic.csv)"}};
  CommonFlags flags;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    AddCommonFlags(sub, &flags);
    if (name == "geodesic") {
      sub->add_option("--target", flags.target, "Geodesic end point")->delimiter(',');
    }
  }
  CLI::App* report = app.add_subcommand(
      "report", "Run every example (or one config) end to end and summarize");
  AddCommonFlags(report, &flags);
  app.add_subcommand("config", "Print a built-in example config as JSON")
      ->add_option("example", flags.example, "Example name")
      ->required()
      ->check(CLI::IsMember(ExampleNames()));

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "config") {
      std::cout << ConfigToJson(ExampleConfig(flags.example)) << "\n";
      return 0;
    }
    if (command == "report" && flags.config_path.empty() && flags.example.empty()) {
      std::vector<PipelineConfig> configs;
      for (const auto& name : ExampleNames()) {
        PipelineConfig c = ExampleConfig(name);
        if (flags.seed) c.seed = *flags.seed;
        configs.push_back(c);
      }
      const std::string out = flags.output_dir.empty() ? "out" : flags.output_dir;
      return RunReport(configs, out, std::cout).exit_code;
    }
    const PipelineConfig c = Resolve(flags);
    return RunCommand(command, c, std::cout).exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
