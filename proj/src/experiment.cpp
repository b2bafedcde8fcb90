#include "adacomp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "adacomp/errors.hpp"
#include "adacomp/parallel.hpp"
#include "adacomp/sir.hpp"
#include "adacomp/throughput.hpp"

#ifndef ADACOMP_VERSION
#define ADACOMP_VERSION "0.0.0-unknown"
#endif

namespace adacomp {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<double> linspace_step(double start, double stop, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long j = 0; j <= n; ++j) out.push_back(start + step * static_cast<double>(j));
  return out;
}

std::vector<double> logspace(double start, double stop, int points) {
  std::vector<double> out;
  for (int j = 0; j < points; ++j) {
    const double t = points == 1 ? 0.0 : static_cast<double>(j) / (points - 1);
    out.push_back(std::exp(std::log(start) + t * (std::log(stop) - std::log(start))));
  }
  return out;
}

std::vector<TierParams> preset_tiers() {
  // macro / pico / femto; feedback bits 3 (n_k - 1).
  return {
      {1, 1e-6, 40.0, 8, 4.0, 21},
      {2, 5e-6, 5.0, 4, 3.5, 9},
      {3, 2e-5, 0.5, 2, 3.0, 3},
  };
}

// ---- JSON helpers ------------------------------------------------------------

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double get_number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
  }
  fail(path, "expected a number");
}

long long get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::vector<double> get_grid(const json& v, const std::string& path) {
  if (v.is_array()) {
    std::vector<double> out;
    for (std::size_t j = 0; j < v.size(); ++j) out.push_back(get_number(v[j], path + "[" + std::to_string(j) + "]"));
    return out;
  }
  if (v.is_object() && v.contains("step")) {
    reject_unknown(v, path, {"start", "stop", "step"});
    const double step = get_number(v.at("step"), path + ".step");
    if (!(step > 0.0)) fail(path + ".step", "must be > 0");
    return linspace_step(get_number(v.at("start"), path + ".start"), get_number(v.at("stop"), path + ".stop"), step);
  }
  if (v.is_object() && v.contains("points")) {
    reject_unknown(v, path, {"start", "stop", "points", "spacing"});
    const double a = get_number(v.at("start"), path + ".start");
    const double b = get_number(v.at("stop"), path + ".stop");
    if (!(a > 0.0 && b > a)) fail(path, "log grid needs 0 < start < stop");
    return logspace(a, b, static_cast<int>(get_integer(v.at("points"), path + ".points")));
  }
  fail(path, "expected an array or a {start, stop, step|points} object");
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json(nullptr);
  return json(v);
}

json grid_json(const std::vector<double>& g) {
  json a = json::array();
  for (double v : g) a.push_back(number_json(v));
  return a;
}

const char* cos_gain_name(CosGainModel m) {
  return m == CosGainModel::kScaledExponential ? "scaled-exponential" : "deterministic";
}

// ---- scenario execution -------------------------------------------------------

std::size_t bound_tier(const ExperimentSpec& spec) { return spec.network.serving_tier.value_or(0); }

std::pair<int, int> link_quantization(const ExperimentSpec& spec) {
  const auto& t = spec.network.tiers.at(bound_tier(spec));
  return {spec.sweep.bits >= 0 ? spec.sweep.bits : t.feedback_bits,
          spec.sweep.antennas >= 0 ? spec.sweep.antennas : t.antennas};
}

std::string window_tag(double w) {
  if (std::isinf(w)) return "winf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%g", w);
  return buf;
}

void run_time_fraction(const ExperimentSpec& spec, std::vector<ResultRow>& rows) {
  const auto [bits, antennas] = link_quantization(spec);
  const auto& grid = spec.sweep.window_grid_ms;
  std::vector<std::vector<ResultRow>> per_point(grid.size());
  parallel_for(grid.size(), spec.workers, [&](std::size_t j0, std::size_t j1) {
    for (std::size_t j = j0; j < j1; ++j) {
      DurationModel m = spec.durations;
      m.window_ms = grid[j];
      const double w = grid[j];
      const double eta = cos_time_fraction(m);
      const double ed = expected_delta(m, bits, antennas);
      RandomStream rng(spec.seed ^ static_cast<std::uint64_t>(j));
      const auto mc = cos_time_fraction_mc(m, spec.trials, rng);
      auto& out = per_point[j];
      out.push_back({w, "eta", eta, 0.0, ""});
      out.push_back({w, "eta_mc", mc.value, mc.standard_error, ""});
      out.push_back({w, "cos_probability", cos_probability(m), 0.0, ""});
      out.push_back({w, "expected_delta", ed, 0.0, ""});
      if (eta > 0.0)
        out.push_back({w, "window_objective", ed / eta, 0.0, ""});
      else
        out.push_back({w, "window_objective", kInf, 0.0, "undefined"});
    }
  });
  for (auto& p : per_point) rows.insert(rows.end(), p.begin(), p.end());
}

void run_throughput_vs_delay(const ExperimentSpec& spec, bool adaptive, std::vector<ResultRow>& rows) {
  std::vector<double> windows{kInf};
  if (adaptive)
    for (double w : spec.sweep.windows_ms)
      if (!std::isinf(w)) windows.push_back(w);
  const auto& delays = spec.sweep.mean_delay_grid_ms;
  std::vector<DurationModel> models;
  for (double d : delays)
    for (double w : windows) {
      DurationModel m = spec.durations;
      m.delay = DelaySpec::uniform(2.0 * d);
      m.window_ms = w;
      models.push_back(m);
    }
  const SirOptions options{spec.cos_gain};
  const auto sweep = throughput_sweep(spec.network, models, {spec.trials, spec.fading_per_geometry},
                                      spec.seed, spec.workers, options);
  for (std::size_t i = 0; i < delays.size(); ++i) {
    const double d = delays[i];
    const std::size_t base = i * windows.size();
    for (std::size_t j = 0; j < windows.size(); ++j) {
      const auto& r = sweep.results[base + j];
      const auto tag = window_tag(windows[j]);
      std::string flags = r.infinite_events ? "infinite_sir=" + std::to_string(r.infinite_events) : "";
      rows.push_back({d, "throughput_" + tag, r.value, r.standard_error, flags});
      rows.push_back({d, "eta_" + tag, cos_time_fraction(models[base + j]), 0.0, ""});
      if (j > 0) {
        const auto [gain, se] = sweep.paired_difference(base + j, base);
        rows.push_back({d, "gain_" + tag, gain, se, "paired"});
      }
    }
    rows.push_back({d, "throughput_uncoordinated", sweep.uncoordinated.value,
                    sweep.uncoordinated.standard_error, ""});
  }
}

void run_ccdf_vs_bounds(const ExperimentSpec& spec, std::vector<ResultRow>& rows) {
  const SirOptions options{spec.cos_gain};
  const auto samples = simulate_sir_batch(spec.network, spec.durations,
                                          {spec.trials, spec.fading_per_geometry}, spec.seed,
                                          spec.workers, options);
  const auto ccdf = ccdf_from_samples(samples, spec.sweep.thresholds);
  const int m = spec.sweep.cos_count >= 0 ? spec.sweep.cos_count
                                          : static_cast<int>(spec.network.coord_set_size);
  const auto inputs = make_bound_inputs(spec.network, bound_tier(spec), spec.durations, m);
  for (std::size_t j = 0; j < ccdf.thresholds.size(); ++j) {
    const double beta = ccdf.thresholds[j];
    std::string flags;
    if (ccdf.infinite_events) flags = "infinite_sir=" + std::to_string(ccdf.infinite_events);
    if (ccdf.isotonic_adjusted) flags += flags.empty() ? "isotonic" : ";isotonic";
    rows.push_back({beta, "ccdf_empirical", ccdf.values[j], ccdf.standard_errors[j], flags});

    const auto lower = ccdf_lower_bound(beta, inputs);
    rows.push_back({beta, "lower_bound", lower.value, 0.0, lower.valid ? "valid" : "vacuous"});
    try {
      const auto upper = ccdf_upper_bound(beta, inputs);
      rows.push_back({beta, "upper_bound", upper.value, 0.0, upper.valid ? "valid" : upper.note});
    } catch (const GammaPoleError&) {
      rows.push_back({beta, "upper_bound", std::nan(""), 0.0, "gamma-pole"});
    }
  }
}

void run_custom(const ExperimentSpec& spec, std::vector<ResultRow>& rows) {
  const auto [bits, antennas] = link_quantization(spec);
  std::vector<DurationModel> models;
  for (double w : spec.sweep.window_grid_ms) {
    DurationModel m = spec.durations;
    m.window_ms = w;
    models.push_back(m);
  }
  const auto sweep = throughput_sweep(spec.network, models, {spec.trials, spec.fading_per_geometry},
                                      spec.seed, spec.workers, SirOptions{spec.cos_gain});
  for (std::size_t j = 0; j < models.size(); ++j) {
    const double w = models[j].window_ms;
    rows.push_back({w, "eta", cos_time_fraction(models[j]), 0.0, ""});
    rows.push_back({w, "expected_delta", expected_delta(models[j], bits, antennas), 0.0, ""});
    const auto& r = sweep.results[j];
    rows.push_back({w, "throughput", r.value, r.standard_error,
                    r.infinite_events ? "infinite_sir=" + std::to_string(r.infinite_events) : ""});
    rows.push_back({w, "throughput_uncoordinated", sweep.uncoordinated.value,
                    sweep.uncoordinated.standard_error, ""});
  }
}

}  // namespace

// ---- scenario names -------------------------------------------------------------

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::kTimeFractionSweep:
      return "time-fraction-sweep";
    case Scenario::kThroughputVsDelayNonAdaptive:
      return "throughput-vs-delay-nonadaptive";
    case Scenario::kThroughputVsDelayAdaptive:
      return "throughput-vs-delay-adaptive";
    case Scenario::kCcdfVsBounds:
      return "ccdf-vs-bounds";
    case Scenario::kCustom:
      return "custom";
  }
  return "?";
}

std::vector<std::string> scenario_names() {
  return {"time-fraction-sweep", "throughput-vs-delay-nonadaptive", "throughput-vs-delay-adaptive",
          "ccdf-vs-bounds", "custom"};
}

Scenario scenario_from_string(const std::string& name) {
  for (auto s : {Scenario::kTimeFractionSweep, Scenario::kThroughputVsDelayNonAdaptive,
                 Scenario::kThroughputVsDelayAdaptive, Scenario::kCcdfVsBounds, Scenario::kCustom})
    if (name == to_string(s)) return s;
  throw ConfigError("scenario: unknown scenario '" + name + "'");
}

// ---- presets --------------------------------------------------------------------

ExperimentSpec preset(Scenario scenario) {
  ExperimentSpec spec;
  spec.scenario = scenario;
  spec.network.tiers = preset_tiers();
  spec.network.sim_radius = 2500.0;
  spec.network.coord_set_size = 1;
  spec.network.serving_tier = 0;
  spec.durations.lifetime = {1.0, 80.0};
  spec.durations.delay = DelaySpec::uniform(150.0);
  spec.durations.window_ms = kInf;
  spec.sweep.window_grid_ms = linspace_step(1.0, 150.0, 1.0);
  spec.sweep.mean_delay_grid_ms = linspace_step(0.0, 150.0, 10.0);
  spec.sweep.windows_ms = {70.0, 100.0};
  spec.sweep.thresholds = logspace(0.01, 10.0, 20);
  spec.seed = 20131001;
  switch (scenario) {
    case Scenario::kTimeFractionSweep:
      spec.trials = 100000;
      break;
    case Scenario::kThroughputVsDelayNonAdaptive:
    case Scenario::kThroughputVsDelayAdaptive:
      spec.trials = 100000;
      spec.fading_per_geometry = 10;
      break;
    case Scenario::kCcdfVsBounds:
      spec.trials = 100000;
      break;
    case Scenario::kCustom:
      spec.trials = 100000;
      spec.fading_per_geometry = 10;
      spec.sweep.window_grid_ms = {20.0, 40.0, 70.0, 100.0, 150.0, kInf};
      break;
  }
  return spec;
}

// ---- validation -----------------------------------------------------------------

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::kError; });
}

std::vector<Diagnostic> validate(const ExperimentSpec& spec) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string field, std::string msg) {
    out.push_back({Diagnostic::Severity::kError, std::move(field), std::move(msg)});
  };
  auto warn = [&](std::string field, std::string msg) {
    out.push_back({Diagnostic::Severity::kWarning, std::move(field), std::move(msg)});
  };

  const auto& net = spec.network;
  if (net.tiers.empty()) error("network.tiers", "at least one tier is required");
  for (std::size_t k = 0; k < net.tiers.size(); ++k) {
    try {
      net.tiers[k].validate();
    } catch (const ConfigError& e) {
      error("network.tiers[" + std::to_string(k) + "]", e.what());
    }
  }
  if (net.sim_radius < 0.0 || !std::isfinite(net.sim_radius))
    error("network.sim_radius_m", "must be finite and >= 0");
  if (net.serving_tier && *net.serving_tier >= net.tiers.size())
    error("network.serving_tier_id", "does not name a configured tier");

  if (!net.tiers.empty() && (!net.serving_tier || *net.serving_tier < net.tiers.size())) {
    std::vector<std::size_t> candidates;
    if (net.serving_tier) {
      candidates.push_back(*net.serving_tier);
    } else {
      for (std::size_t k = 0; k < net.tiers.size(); ++k) candidates.push_back(k);
    }
    for (auto k : candidates)
      if (net.coord_set_size >= static_cast<std::size_t>(std::max(net.tiers[k].antennas, 0)))
        error("network.coord_set_size",
              "zero-forcing infeasible: |S| = " + std::to_string(net.coord_set_size) +
                  " is not below the " + std::to_string(net.tiers[k].antennas) +
                  " antennas of serving tier " + std::to_string(net.tiers[k].tier_id));

    const auto& s = net.tiers[net.serving_tier.value_or(0)];
    if (spec.scenario == Scenario::kCcdfVsBounds) {
      const double half = s.path_loss_exp / 2.0;
      if (half == std::floor(half))
        warn("network.tiers.path_loss_exp",
             "upper bound requested with alpha = " + format_number(s.path_loss_exp) +
                 " at the serving tier: Gamma(1 - alpha/2) pole, the upper bound will be flagged");
      else if (std::tgamma(1.0 - half) < 0.0)
        warn("network.tiers.path_loss_exp",
             "Gamma(1 - alpha/2) is negative for the serving tier; the upper bound will be flagged");
      if (s.antennas - static_cast<int>(net.coord_set_size) - 1 < 1)
        error("network.coord_set_size", "the lower bound needs n - |S| - 1 >= 1");
    }
    if (net.coord_set_size > 0 && s.antennas < 2)
      error("network.tiers.antennas", "coordinated links need at least two antennas");
  }

  try {
    spec.durations.validate();
  } catch (const ConfigError& e) {
    error("durations", e.what());
  }
  if (spec.trials < 1) error("trials", "must be >= 1");
  if (spec.fading_per_geometry < 1) error("fading_per_geometry", "must be >= 1");
  if (spec.workers < 1) error("workers", "must be >= 1");

  auto check_grid = [&](const std::vector<double>& g, const std::string& field, bool positive) {
    if (g.empty()) {
      error(field, "grid must be nonempty");
      return;
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (std::isnan(g[j]) || g[j] < 0.0 || (positive && !(g[j] > 0.0)))
        error(field + "[" + std::to_string(j) + "]", "invalid grid value");
      if (j > 0 && !(g[j] > g[j - 1])) error(field, "grid must be strictly ascending");
    }
  };
  switch (spec.scenario) {
    case Scenario::kTimeFractionSweep:
    case Scenario::kCustom:
      check_grid(spec.sweep.window_grid_ms, "sweep.window_grid_ms", false);
      break;
    case Scenario::kThroughputVsDelayAdaptive:
      check_grid(spec.sweep.windows_ms, "sweep.windows_ms", false);
      [[fallthrough]];
    case Scenario::kThroughputVsDelayNonAdaptive:
      check_grid(spec.sweep.mean_delay_grid_ms, "sweep.mean_delay_grid_ms", false);
      for (double d : spec.sweep.mean_delay_grid_ms)
        if (std::isinf(d)) error("sweep.mean_delay_grid_ms", "delays must be finite");
      break;
    case Scenario::kCcdfVsBounds:
      check_grid(spec.sweep.thresholds, "sweep.thresholds", false);
      if (spec.sweep.cos_count > static_cast<int>(net.coord_set_size))
        error("sweep.cos_count", "must not exceed coord_set_size");
      break;
  }
  if (spec.sweep.antennas == 1) error("sweep.antennas", "quantized links need at least two antennas");
  return out;
}

// ---- JSON -------------------------------------------------------------------------

ExperimentSpec parse_spec(const json& doc) {
  reject_unknown(doc, "config",
                 {"scenario", "network", "durations", "sweep", "trials", "fading_per_geometry", "seed",
                  "workers", "output_path"});
  const Scenario scenario = doc.contains("scenario")
                                ? scenario_from_string(doc.at("scenario").get<std::string>())
                                : Scenario::kCustom;
  ExperimentSpec spec = preset(scenario);

  if (doc.contains("network")) {
    const auto& n = doc.at("network");
    reject_unknown(n, "network",
                   {"tiers", "sim_radius_m", "coord_set_size", "serving_tier_id",
                    "far_field_compensation", "cos_gain_model"});
    if (n.contains("tiers")) {
      const auto& tiers = n.at("tiers");
      if (!tiers.is_array()) fail("network.tiers", "expected an array");
      spec.network.tiers.clear();
      for (std::size_t k = 0; k < tiers.size(); ++k) {
        const auto path = "network.tiers[" + std::to_string(k) + "]";
        const auto& t = tiers[k];
        reject_unknown(t, path,
                       {"tier_id", "density_per_m2", "power_w", "antennas", "path_loss_exp", "feedback_bits"});
        TierParams p;
        p.tier_id = t.contains("tier_id") ? static_cast<int>(get_integer(t.at("tier_id"), path + ".tier_id"))
                                          : static_cast<int>(k + 1);
        for (const char* key : {"density_per_m2", "power_w", "antennas", "path_loss_exp"})
          if (!t.contains(key)) fail(path + "." + key, "required");
        p.density = get_number(t.at("density_per_m2"), path + ".density_per_m2");
        p.power = get_number(t.at("power_w"), path + ".power_w");
        p.antennas = static_cast<int>(get_integer(t.at("antennas"), path + ".antennas"));
        p.path_loss_exp = get_number(t.at("path_loss_exp"), path + ".path_loss_exp");
        p.feedback_bits = t.contains("feedback_bits")
                              ? static_cast<int>(get_integer(t.at("feedback_bits"), path + ".feedback_bits"))
                              : 3 * (p.antennas - 1);
        spec.network.tiers.push_back(p);
      }
    }
    if (n.contains("sim_radius_m")) spec.network.sim_radius = get_number(n.at("sim_radius_m"), "network.sim_radius_m");
    if (n.contains("coord_set_size")) {
      const auto v = get_integer(n.at("coord_set_size"), "network.coord_set_size");
      if (v < 0) fail("network.coord_set_size", "must be >= 0");
      spec.network.coord_set_size = static_cast<std::size_t>(v);
    }
    if (n.contains("serving_tier_id")) {
      const auto& v = n.at("serving_tier_id");
      if (v.is_null()) {
        spec.network.serving_tier.reset();
      } else {
        const auto id = get_integer(v, "network.serving_tier_id");
        const auto& tiers = spec.network.tiers;
        const auto it = std::find_if(tiers.begin(), tiers.end(), [&](const TierParams& t) { return t.tier_id == id; });
        if (it == tiers.end()) fail("network.serving_tier_id", "no tier with id " + std::to_string(id));
        spec.network.serving_tier = static_cast<std::size_t>(it - tiers.begin());
      }
    }
    if (n.contains("far_field_compensation")) {
      if (!n.at("far_field_compensation").is_boolean()) fail("network.far_field_compensation", "expected a boolean");
      spec.network.far_field_compensation = n.at("far_field_compensation").get<bool>();
    }
    if (n.contains("cos_gain_model")) {
      const auto m = n.at("cos_gain_model").get<std::string>();
      if (m == "scaled-exponential")
        spec.cos_gain = CosGainModel::kScaledExponential;
      else if (m == "deterministic")
        spec.cos_gain = CosGainModel::kDeterministic;
      else
        fail("network.cos_gain_model", "expected 'scaled-exponential' or 'deterministic'");
    }
  }

  if (doc.contains("durations")) {
    const auto& d = doc.at("durations");
    reject_unknown(d, "durations", {"lifetime", "delay", "window_ms"});
    if (d.contains("lifetime")) {
      const auto& l = d.at("lifetime");
      reject_unknown(l, "durations.lifetime", {"gamma_shape", "mean_lifetime_ms"});
      if (l.contains("gamma_shape"))
        spec.durations.lifetime.gamma_shape = get_number(l.at("gamma_shape"), "durations.lifetime.gamma_shape");
      if (l.contains("mean_lifetime_ms"))
        spec.durations.lifetime.mean_ms = get_number(l.at("mean_lifetime_ms"), "durations.lifetime.mean_lifetime_ms");
    }
    if (d.contains("delay")) {
      const auto& dl = d.at("delay");
      reject_unknown(dl, "durations.delay", {"kind", "max_delay_ms", "delay_ms", "mean_delay_ms"});
      const auto kind = dl.value("kind", std::string("uniform"));
      auto need = [&](const char* key) {
        if (!dl.contains(key)) fail(std::string("durations.delay.") + key, "required for kind '" + kind + "'");
        return get_number(dl.at(key), std::string("durations.delay.") + key);
      };
      if (kind == "uniform")
        spec.durations.delay = DelaySpec::uniform(need("max_delay_ms"));
      else if (kind == "fixed")
        spec.durations.delay = DelaySpec::fixed(need("delay_ms"));
      else if (kind == "exponential")
        spec.durations.delay = DelaySpec::exponential(need("mean_delay_ms"));
      else
        fail("durations.delay.kind", "expected uniform, fixed or exponential");
    }
    if (d.contains("window_ms")) spec.durations.window_ms = get_number(d.at("window_ms"), "durations.window_ms");
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    reject_unknown(s, "sweep",
                   {"window_grid_ms", "mean_delay_grid_ms", "windows_ms", "thresholds", "bits", "antennas", "cos_count"});
    if (s.contains("window_grid_ms")) spec.sweep.window_grid_ms = get_grid(s.at("window_grid_ms"), "sweep.window_grid_ms");
    if (s.contains("mean_delay_grid_ms"))
      spec.sweep.mean_delay_grid_ms = get_grid(s.at("mean_delay_grid_ms"), "sweep.mean_delay_grid_ms");
    if (s.contains("windows_ms")) spec.sweep.windows_ms = get_grid(s.at("windows_ms"), "sweep.windows_ms");
    if (s.contains("thresholds")) spec.sweep.thresholds = get_grid(s.at("thresholds"), "sweep.thresholds");
    if (s.contains("bits")) spec.sweep.bits = static_cast<int>(get_integer(s.at("bits"), "sweep.bits"));
    if (s.contains("antennas")) spec.sweep.antennas = static_cast<int>(get_integer(s.at("antennas"), "sweep.antennas"));
    if (s.contains("cos_count")) spec.sweep.cos_count = static_cast<int>(get_integer(s.at("cos_count"), "sweep.cos_count"));
  }

  if (doc.contains("trials")) {
    const auto v = get_integer(doc.at("trials"), "trials");
    if (v < 1) fail("trials", "must be >= 1");
    spec.trials = static_cast<std::uint64_t>(v);
  }
  if (doc.contains("fading_per_geometry")) {
    const auto v = get_integer(doc.at("fading_per_geometry"), "fading_per_geometry");
    if (v < 1) fail("fading_per_geometry", "must be >= 1");
    spec.fading_per_geometry = static_cast<std::uint32_t>(v);
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) fail("seed", "expected an integer");
    spec.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("workers")) {
    const auto v = get_integer(doc.at("workers"), "workers");
    if (v < 1) fail("workers", "must be >= 1");
    spec.workers = static_cast<unsigned>(v);
  }
  if (doc.contains("output_path")) spec.output_path = doc.at("output_path").get<std::string>();
  return spec;
}

ExperimentSpec parse_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    return parse_spec(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json to_json(const ExperimentSpec& spec) {
  json tiers = json::array();
  for (const auto& t : spec.network.tiers)
    tiers.push_back({{"tier_id", t.tier_id},
                     {"density_per_m2", t.density},
                     {"power_w", t.power},
                     {"antennas", t.antennas},
                     {"path_loss_exp", t.path_loss_exp},
                     {"feedback_bits", t.feedback_bits}});
  json network = {{"tiers", tiers},
                  {"sim_radius_m", spec.network.sim_radius},
                  {"coord_set_size", spec.network.coord_set_size},
                  {"far_field_compensation", spec.network.far_field_compensation},
                  {"cos_gain_model", cos_gain_name(spec.cos_gain)}};
  network["serving_tier_id"] =
      spec.network.serving_tier ? json(spec.network.tiers.at(*spec.network.serving_tier).tier_id) : json(nullptr);

  json delay;
  const auto& d = spec.durations.delay;
  switch (d.kind()) {
    case DelaySpec::Kind::kUniform:
      delay = {{"kind", "uniform"}, {"max_delay_ms", d.parameter()}};
      break;
    case DelaySpec::Kind::kFixed:
      delay = {{"kind", "fixed"}, {"delay_ms", d.parameter()}};
      break;
    case DelaySpec::Kind::kExponential:
      delay = {{"kind", "exponential"}, {"mean_delay_ms", d.parameter()}};
      break;
    case DelaySpec::Kind::kCustom:
      delay = {{"kind", "custom"}, {"description", d.describe()}};
      break;
  }
  json out = {
      {"scenario", to_string(spec.scenario)},
      {"network", network},
      {"durations",
       {{"lifetime",
         {{"gamma_shape", spec.durations.lifetime.gamma_shape},
          {"mean_lifetime_ms", spec.durations.lifetime.mean_ms}}},
        {"delay", delay},
        {"window_ms", number_json(spec.durations.window_ms)}}},
      {"sweep",
       {{"window_grid_ms", grid_json(spec.sweep.window_grid_ms)},
        {"mean_delay_grid_ms", grid_json(spec.sweep.mean_delay_grid_ms)},
        {"windows_ms", grid_json(spec.sweep.windows_ms)},
        {"thresholds", grid_json(spec.sweep.thresholds)},
        {"bits", spec.sweep.bits},
        {"antennas", spec.sweep.antennas},
        {"cos_count", spec.sweep.cos_count}}},
      {"trials", spec.trials},
      {"fading_per_geometry", spec.fading_per_geometry},
      {"seed", spec.seed},
      {"workers", spec.workers},
  };
  if (!spec.output_path.empty()) out["output_path"] = spec.output_path;
  return out;
}

// ---- execution & output ---------------------------------------------------------

std::vector<ResultRow> run(const ExperimentSpec& spec) {
  const auto diagnostics = validate(spec);
  if (has_errors(diagnostics)) {
    for (const auto& d : diagnostics)
      if (d.severity == Diagnostic::Severity::kError) throw ConfigError(d.field + ": " + d.message);
  }
  std::vector<ResultRow> rows;
  switch (spec.scenario) {
    case Scenario::kTimeFractionSweep:
      run_time_fraction(spec, rows);
      break;
    case Scenario::kThroughputVsDelayNonAdaptive:
      run_throughput_vs_delay(spec, false, rows);
      break;
    case Scenario::kThroughputVsDelayAdaptive:
      run_throughput_vs_delay(spec, true, rows);
      break;
    case Scenario::kCcdfVsBounds:
      run_ccdf_vs_bounds(spec, rows);
      break;
    case Scenario::kCustom:
      run_custom(spec, rows);
      break;
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "sweep_value,metric,value,stderr,flags\n";
  for (const auto& r : rows)
    os << format_number(r.sweep_value) << ',' << r.metric << ',' << format_number(r.value) << ','
       << format_number(r.standard_error) << ',' << r.flags << '\n';
}

json rows_to_json(const std::vector<ResultRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"sweep_value", number_json(r.sweep_value)},
                   {"metric", r.metric},
                   {"value", number_json(r.value)},
                   {"stderr", number_json(r.standard_error)},
                   {"flags", r.flags}});
  return out;
}

json manifest(const ExperimentSpec& spec) {
  json out = {{"version", version_string()}, {"config", to_json(spec)}};
  out["resolved_sim_radius_m"] = spec.network.tiers.empty() ? 0.0 : spec.network.resolved_radius();
  return out;
}

std::string version_string() { return ADACOMP_VERSION; }

}  // namespace adacomp
