#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kinfault/config.hpp"
#include "kinfault/pipeline.hpp"
#include "kinfault/traces.hpp"

using namespace kinfault;

namespace {

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::optional<std::uint64_t>& seed, const std::string& output_dir,
            const std::string& heading, bool parallel) {
  Scenario sc = config_path.empty() ? preset(preset_name) : parse_config(config_path);
  if (seed) sc.seed = *seed;
  if (!output_dir.empty()) sc.output_dir = output_dir;
  if (!heading.empty()) sc.trajectory.heading = parse_heading_mode(heading);
  if (parallel) sc.parallel = true;
  sc.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const RunResult run = run_scenario(sc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_traces(run, sc.output_dir);

  const auto& s = run.summary;
  std::printf("%s: %s after %ld steps in %.2f s\n", sc.name.c_str(), to_string(s.status).c_str(),
              s.steps_run, secs);
  if (!s.message.empty()) std::printf("  %s\n", s.message.c_str());
  std::printf("  sustained verdict: %s", s.sustained_verdict ? to_string(*s.sustained_verdict).c_str() : "none");
  if (s.sustained_step) std::printf(" (from step %ld)", *s.sustained_step);
  std::printf("\n  traces: %s\n", sc.output_dir.c_str());
  return s.status == RunStatus::completed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor fault detection from kinematic consistency residuals"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario and write CSV traces");
  std::string config_path, preset_name, output_dir, heading;
  std::optional<std::uint64_t> seed;
  bool parallel = false;
  auto* cfg_opt = run->add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
  auto* preset_opt = run->add_option("--preset", preset_name, "built-in scenario");
  cfg_opt->excludes(preset_opt);
  run->add_option("--seed", seed, "override the noise seed");
  run->add_option("--output-dir", output_dir, "override the output directory");
  run->add_option("--heading", heading, "override the heading mode (velocity or radial)");
  run->add_flag("--parallel", parallel, "step the differentiators on OpenMP threads");

  auto* presets = app.add_subcommand("presets", "built-in scenarios");
  auto* presets_list = presets->add_subcommand("list", "list built-in scenarios");
  presets->require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check a config file");
  std::string validate_path;
  validate->add_option("--config", validate_path, "scenario config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (config_path.empty() && preset_name.empty()) {
        std::cerr << "run: one of --config or --preset is required\n";
        return 1;
      }
      return cmd_run(config_path, preset_name, seed, output_dir, heading, parallel);
    }
    if (presets_list->parsed()) {
      for (const auto& name : preset_names()) {
        std::printf("%-10s %s\n", name.c_str(), preset_description(name).c_str());
      }
      return 0;
    }
    if (validate->parsed()) {
      const Scenario sc = parse_config(validate_path);
      std::printf("%s: ok (scenario %s)\n", validate_path.c_str(), sc.name.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
