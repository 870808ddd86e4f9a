#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "catlock/config.hpp"
#include "catlock/errors.hpp"
#include "catlock/estimator.hpp"
#include "catlock/orchestrator.hpp"
#include "catlock/record_io.hpp"

namespace py = pybind11;
using namespace catlock;

namespace {

py::object to_python(const nlohmann::ordered_json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

RunConfig make_config(const std::optional<std::string>& preset_name, const std::optional<std::string>& config_path,
                      const std::vector<std::string>& overrides) {
  return parse_config(preset_name, config_path, overrides);
}

template <typename F>
py::array_t<double> column(const TrajectoryRecord& r, F field) {
  py::array_t<double> out(static_cast<py::ssize_t>(r.rows.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < r.rows.size(); ++i) view(static_cast<py::ssize_t>(i)) = field(r.rows[i]);
  return out;
}

py::dict columns(const TrajectoryRecord& r) {
  py::dict d;
  d["t"] = column(r, [](const TrajectoryRow& x) { return x.t; });
  d["x_true"] = column(r, [](const TrajectoryRow& x) { return x.x_true; });
  d["x_est"] = column(r, [](const TrajectoryRow& x) { return x.x_est; });
  d["parity_true"] = column(r, [](const TrajectoryRow& x) { return x.parity_true; });
  d["parity_est"] = column(r, [](const TrajectoryRow& x) { return x.parity_est; });
  d["n_true"] = column(r, [](const TrajectoryRow& x) { return x.n_true; });
  d["n_est"] = column(r, [](const TrajectoryRow& x) { return x.n_est; });
  d["mult"] = column(r, [](const TrajectoryRow& x) { return x.mult; });
  d["x2_true"] = column(r, [](const TrajectoryRow& x) { return x.x2_true; });
  d["x2_est"] = column(r, [](const TrajectoryRow& x) { return x.x2_est; });
  d["purity"] = column(r, [](const TrajectoryRow& x) { return x.purity; });
  py::list mode, window;
  for (const TrajectoryRow& x : r.rows) {
    mode.append(x.mode);
    window.append(x.window);
  }
  d["mode"] = mode;
  d["window"] = window;
  return d;
}

py::dict metrics_dict(const TrajectoryMetrics& m) {
  py::dict d;
  d["x2_rms_ratio"] = m.x2_rms_ratio;
  d["x_rms_ratio"] = m.x_rms_ratio;
  d["parity_agreement"] = m.parity_agreement;
  d["mean_purity"] = m.mean_purity;
  d["band_occupancy"] = m.band_occupancy;
  d["emissions"] = m.emissions;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "closed-loop cat-state tracking and stabilization";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<RecordIoError>(m, "RecordIoError", PyExc_IOError);

  m.attr("TRAJECTORY_SCHEMA") = std::string(kTrajectorySchema);
  m.attr("TRAJECTORY_SCHEMA_VERSION") = kTrajectorySchemaVersion;

  m.def("presets", &preset_names);
  m.def(
      "config",
      [](std::optional<std::string> preset_name, std::optional<std::string> path, std::vector<std::string> overrides) {
        return to_python(config_to_json(make_config(preset_name, path, overrides)));
      },
      py::arg("preset") = std::nullopt, py::arg("config") = std::nullopt,
      py::arg("overrides") = std::vector<std::string>{});

  py::class_<TrajectoryRecord>(m, "Trajectory")
      .def_readonly("seed", &TrajectoryRecord::seed)
      .def_readonly("initial_parity", &TrajectoryRecord::initial_parity)
      .def_readonly("filter_resets", &TrajectoryRecord::filter_resets)
      .def_property_readonly("config", [](const TrajectoryRecord& r) { return to_python(r.config); })
      .def_property_readonly("events",
                             [](const TrajectoryRecord& r) {
                               py::list out;
                               for (const TrajectoryEvent& e : r.events) out.append(py::make_tuple(e.kind, e.t));
                               return out;
                             })
      .def_property_readonly("columns", &columns)
      .def("__len__", [](const TrajectoryRecord& r) { return r.rows.size(); })
      .def("metrics", [](const TrajectoryRecord& r, double transient) { return metrics_dict(compute_metrics(r, transient)); },
           py::arg("transient") = 5.0)
      .def("to_ndjson", &to_ndjson)
      .def("write", [](const TrajectoryRecord& r, const std::string& path) { write_records(r, path); });

  m.def(
      "run",
      [](std::optional<std::string> preset_name, std::vector<std::string> overrides, std::uint64_t seed) {
        const RunConfig c = make_config(preset_name, std::nullopt, overrides);
        py::gil_scoped_release release;
        return run_trajectory(c, seed);
      },
      py::arg("preset") = "fig1a", py::arg("overrides") = std::vector<std::string>{}, py::arg("seed") = 1);
  m.def("from_ndjson", &from_ndjson);
  m.def("read_ndjson", &read_records);

  m.def(
      "cat_moments",
      [](double x, double p, double Vx, double Vp, double C) {
        const CatMoments cm = cat_moments(x, p, Vx, Vp, C);
        return py::make_tuple(cm.chi, cm.x2_even, cm.x2_odd);
      },
      py::arg("x"), py::arg("p"), py::arg("Vx"), py::arg("Vp"), py::arg("C"), "(chi, <x²>_even, <x²>_odd)");
  m.def(
      "parity_gain",
      [](double x, double p, double Vx, double Vp, double C, double P, double k) {
        EstimatorState s;
        s.x = x;
        s.p = p;
        s.Vx = Vx;
        s.Vp = Vp;
        s.C = C;
        s.P = P;
        s.P_plus = P;
        return parity_gain(s, k);
      },
      py::arg("x"), py::arg("p"), py::arg("Vx"), py::arg("Vp"), py::arg("C"), py::arg("P"), py::arg("k"));
}
