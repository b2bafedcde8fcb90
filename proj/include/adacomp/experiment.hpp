#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adacomp/fading.hpp"
#include "adacomp/network.hpp"
#include "adacomp/overhead.hpp"
#include "json.hpp"

namespace adacomp {

enum class Scenario {
  kTimeFractionSweep,
  kThroughputVsDelayNonAdaptive,
  kThroughputVsDelayAdaptive,
  kCcdfVsBounds,
  kCustom,
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);  ///< throws ConfigError
std::vector<std::string> scenario_names();

struct SweepSpec {
  std::vector<double> window_grid_ms;      ///< time-fraction-sweep, custom
  std::vector<double> mean_delay_grid_ms;  ///< throughput scenarios; D ~ U[0, 2*mean]
  std::vector<double> windows_ms;          ///< adaptive windows compared per delay
  std::vector<double> thresholds;          ///< linear SIR thresholds
  /// Quantization of the coordinated link; < 0 selects the serving tier's.
  int bits = -1;
  int antennas = -1;
  /// COS count used by the upper bound; < 0 selects |S|.
  int cos_count = -1;
};

struct ExperimentSpec {
  Scenario scenario = Scenario::kCustom;
  NetworkConfig network;
  CosGainModel cos_gain = CosGainModel::kScaledExponential;
  DurationModel durations;
  SweepSpec sweep;
  std::uint64_t trials = 100000;
  std::uint32_t fading_per_geometry = 1;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output_path;
};

/// Three-tier macro/pico/femto setup for `scenario` with its default grids.
ExperimentSpec preset(Scenario scenario);

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string field;
  std::string message;
};

/// Checks every type invariant and cross-field constraint; never throws.
std::vector<Diagnostic> validate(const ExperimentSpec& spec);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Parses a config document. Missing sections fall back to the preset of
/// the named scenario. Throws ConfigError naming the offending field.
ExperimentSpec parse_spec(const nlohmann::json& doc);
ExperimentSpec parse_spec_text(const std::string& text);
nlohmann::json to_json(const ExperimentSpec& spec);

struct ResultRow {
  double sweep_value = 0.0;
  std::string metric;
  double value = 0.0;
  double standard_error = 0.0;
  std::string flags;
};

/// Executes the scenario. Deterministic for a given (spec, seed) and
/// independent of spec.workers. Throws ConfigError if validation fails.
std::vector<ResultRow> run(const ExperimentSpec& spec);

/// Header plus one line per row, 9 significant digits.
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
nlohmann::json rows_to_json(const std::vector<ResultRow>& rows);
nlohmann::json manifest(const ExperimentSpec& spec);

std::string version_string();

}  // namespace adacomp
