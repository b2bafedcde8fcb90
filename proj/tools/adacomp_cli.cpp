#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "adacomp/errors.hpp"
#include "adacomp/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw adacomp::ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostics(const std::vector<adacomp::Diagnostic>& diags) {
  for (const auto& d : diags)
    std::cerr << (d.severity == adacomp::Diagnostic::Severity::kError ? "error: " : "warning: ")
              << d.field << ": " << d.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive coordinated multipoint experiments"};
  app.set_version_flag("--version", adacomp::version_string());

  std::string config_path, scenario, output, format = "csv";
  std::uint64_t seed = 0, trials = 0;
  unsigned workers = 0;

  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "Scenario name (overrides the config)");
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", output, "Output file (default: stdout)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* validate_cmd = app.add_subcommand("validate", "Check a config and print diagnostics");
  auto* preset_cmd = app.add_subcommand("preset", "Print the preset config of a scenario");
  std::string preset_name;
  preset_cmd->add_option("name", preset_name, "Scenario")->required();
  app.require_subcommand(0, 1);
  validate_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  adacomp::ExperimentSpec spec;
  try {
    if (*preset_cmd) {
      std::cout << adacomp::to_json(adacomp::preset(adacomp::scenario_from_string(preset_name))).dump(2) << '\n';
      return kOk;
    }
    if (!config_path.empty()) {
      spec = adacomp::parse_spec_text(read_file(config_path));
      if (!scenario.empty()) spec.scenario = adacomp::scenario_from_string(scenario);
    } else if (!scenario.empty()) {
      spec = adacomp::preset(adacomp::scenario_from_string(scenario));
    } else {
      std::cerr << "error: one of --config or --scenario is required\n";
      return kConfigError;
    }
    if (app.count("--seed")) spec.seed = seed;
    if (trials) spec.trials = trials;
    if (workers) spec.workers = workers;
    if (!output.empty()) spec.output_path = output;
  } catch (const adacomp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  const auto diags = adacomp::validate(spec);
  print_diagnostics(diags);
  if (adacomp::has_errors(diags)) return kConfigError;
  if (*validate_cmd) {
    std::cout << "ok\n";
    return kOk;
  }

  try {
    const auto rows = adacomp::run(spec);
    const auto write = [&](std::ostream& os) {
      if (format == "json") {
        nlohmann::json doc = adacomp::manifest(spec);
        doc["rows"] = adacomp::rows_to_json(rows);
        os << doc.dump(2) << '\n';
      } else {
        adacomp::write_csv(os, rows);
      }
    };
    if (spec.output_path.empty()) {
      write(std::cout);
    } else {
      std::ofstream out(spec.output_path);
      if (!out) throw std::runtime_error("cannot write " + spec.output_path);
      write(out);
      std::ofstream side(spec.output_path + ".manifest.json");
      side << adacomp::manifest(spec).dump(2) << '\n';
    }
  } catch (const adacomp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
