#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "adacomp/errors.hpp"
#include "adacomp/experiment.hpp"
#include "adacomp/overhead.hpp"
#include "adacomp/sir.hpp"
#include "adacomp/throughput.hpp"

namespace py = pybind11;
using namespace adacomp;

namespace {

DurationModel make_model(double mean_lifetime_ms, double gamma_shape, double max_delay_ms, double window_ms) {
  DurationModel m;
  m.lifetime = {gamma_shape, mean_lifetime_ms};
  m.delay = DelaySpec::uniform(max_delay_ms);
  m.window_ms = window_ms;
  m.validate();
  return m;
}

ExperimentSpec spec_from(const std::string& config) { return parse_spec_text(config); }

}  // namespace

PYBIND11_MODULE(_adacomp, m) {
  m.doc() = "Adaptive CoMP zero-forcing in multi-tier cellular networks";
  m.attr("__version__") = version_string();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<LinkState>(m, "LinkState")
      .value("COS", LinkState::kCos)
      .value("STALE_ACTIVE", LinkState::kStaleActive)
      .value("SILENT", LinkState::kSilent)
      .value("NOT_COORDINATED", LinkState::kNotCoordinated);

  py::class_<DurationModel>(m, "DurationModel")
      .def(py::init(&make_model), py::arg("mean_lifetime_ms") = 80.0, py::arg("gamma_shape") = 1.0,
           py::arg("max_delay_ms") = 150.0, py::arg("window_ms") = kInfiniteWindow)
      .def_readwrite("window_ms", &DurationModel::window_ms)
      .def("__repr__", [](const DurationModel& d) {
        std::ostringstream os;
        os << "DurationModel(mean_lifetime_ms=" << d.lifetime.mean_ms << ", gamma_shape=" << d.lifetime.gamma_shape
           << ", delay=" << d.delay.describe() << ", window_ms=" << d.window_ms << ")";
        return os.str();
      });

  m.def("classify", &classify, py::arg("lifetime_ms"), py::arg("delay_ms"), py::arg("window_ms"));
  m.def("delta_factor", &delta_factor, py::arg("member"), py::arg("state"), py::arg("bits"), py::arg("antennas"));
  m.def("quantization_scale", &quantization_scale, py::arg("bits"), py::arg("antennas"));
  m.def("expected_delta", &expected_delta, py::arg("model"), py::arg("bits"), py::arg("antennas"),
        py::arg("member") = true);
  m.def("cos_probability", &cos_probability, py::arg("model"));
  m.def("cos_time_fraction", &cos_time_fraction, py::arg("model"));
  m.def(
      "cos_time_fraction_mc",
      [](const DurationModel& model, std::uint64_t blocks, std::uint64_t seed) {
        RandomStream rng(seed);
        const auto r = cos_time_fraction_mc(model, blocks, rng);
        return py::make_tuple(r.value, r.standard_error);
      },
      py::arg("model"), py::arg("blocks"), py::arg("seed") = 1);
  m.def(
      "optimize_window",
      [](const DurationModel& model, int bits, int antennas, double lo, double hi) {
        const auto r = optimize_window(model, bits, antennas, lo, hi);
        return py::make_tuple(r.window_ms, r.objective, r.at_boundary);
      },
      py::arg("model"), py::arg("bits"), py::arg("antennas"), py::arg("w_lo"), py::arg("w_hi"));

  m.def("distance_ratio_moment", &distance_ratio_moment, py::arg("i"), py::arg("alpha"));
  m.def("cos_count_pmf", py::overload_cast<double, std::size_t>(&cos_count_pmf), py::arg("eta"),
        py::arg("set_size"));

  m.def("scenarios", &scenario_names);
  m.def(
      "preset",
      [](const std::string& name) { return to_json(preset(scenario_from_string(name))).dump(); },
      py::arg("scenario"), "Preset config of a scenario as JSON text.");
  m.def(
      "validate",
      [](const std::string& config) {
        py::list out;
        for (const auto& d : validate(spec_from(config)))
          out.append(py::make_tuple(d.severity == Diagnostic::Severity::kError ? "error" : "warning", d.field,
                                    d.message));
        return out;
      },
      py::arg("config"), "Diagnostics for a JSON config: (severity, field, message) tuples.");
  m.def(
      "run",
      [](const std::string& config) {
        const auto spec = spec_from(config);
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run(spec);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["sweep_value"] = r.sweep_value;
          d["metric"] = r.metric;
          d["value"] = r.value;
          d["stderr"] = r.standard_error;
          d["flags"] = r.flags;
          out.append(d);
        }
        return out;
      },
      py::arg("config"), "Runs a JSON config and returns its result rows.");
  m.def(
      "run_csv",
      [](const std::string& config) {
        const auto spec = spec_from(config);
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_csv(os, run(spec));
        }
        return os.str();
      },
      py::arg("config"));
}
