// Python bindings.  Configs and sweep results cross the boundary as plain
// dicts (through JSON text) so they match the CLI's files exactly.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fwm/error.hpp"
#include "fwm/oracle.hpp"
#include "fwm/sweep.hpp"

namespace py = pybind11;
using namespace fwm;

namespace {

nlohmann::json to_nlohmann(const py::object& obj) {
  const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Formulation parse_formulation(const std::string& s) {
  if (s == "corrected") return Formulation::Corrected;
  if (s == "published") return Formulation::Published;
  throw ConfigError("formulation must be 'corrected' or 'published'");
}

WitnessId make_id(const std::string& criterion, const std::string& modes, int m, int n) {
  WitnessId id{parse_criterion(criterion), modes, m, n};
  id.validate();
  return id;
}

}  // namespace

PYBIND11_MODULE(fwm, mod) {
  mod.doc() = "Entanglement witnesses for three-mode four-wave mixing";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidWitness>(mod, "InvalidWitness", PyExc_ValueError);
  py::register_exception<CutoffError>(mod, "CutoffError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", PyExc_RuntimeError);

  py::class_<ModelParams>(mod, "ModelParams")
      .def(py::init<double, double, double, double>(), py::arg("omega_a"), py::arg("omega_b"), py::arg("omega_c"),
           py::arg("g"))
      .def_static("from_detuning", &ModelParams::from_detuning, py::arg("delta"), py::arg("g"))
      .def_readwrite("omega_a", &ModelParams::omega_a)
      .def_readwrite("omega_b", &ModelParams::omega_b)
      .def_readwrite("omega_c", &ModelParams::omega_c)
      .def_readwrite("g", &ModelParams::g)
      .def_property_readonly("delta", [](const ModelParams& p) { return delta_omega1(p); })
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(" + format_double(p.omega_a) + ", " + format_double(p.omega_b) + ", " +
               format_double(p.omega_c) + ", " + format_double(p.g) + ")";
      });

  py::class_<CoherentInput>(mod, "CoherentInput")
      .def(py::init<cplx, cplx, cplx>(), py::arg("alpha"), py::arg("beta"), py::arg("gamma"))
      .def_static("with_pump_phase", &CoherentInput::with_pump_phase, py::arg("alpha_abs"), py::arg("phi"),
                  py::arg("beta"), py::arg("gamma"))
      .def_readwrite("alpha", &CoherentInput::alpha)
      .def_readwrite("beta", &CoherentInput::beta)
      .def_readwrite("gamma", &CoherentInput::gamma);

  py::class_<PerturbativeCoefficients>(mod, "Coefficients")
      .def_readonly("t", &PerturbativeCoefficients::t)
      .def_readonly("perturbative_valid", &PerturbativeCoefficients::perturbative_valid)
      .def("f", &PerturbativeCoefficients::f, py::arg("k"))
      .def("g", &PerturbativeCoefficients::g, py::arg("k"))
      .def("h", &PerturbativeCoefficients::h, py::arg("k"));

  mod.def("coefficients", &coefficients, py::arg("params"), py::arg("t"));

  mod.def(
      "witness",
      [](const std::string& criterion, const std::string& modes, const ModelParams& p, const CoherentInput& in,
         double t, int m, int n, const std::string& formulation) {
        return evaluate(make_id(criterion, modes, m, n), coefficients(p, t), in, parse_formulation(formulation)).value;
      },
      py::arg("criterion"), py::arg("modes"), py::arg("params"), py::arg("input"), py::arg("t"), py::arg("m") = 1,
      py::arg("n") = 1, py::arg("formulation") = "corrected",
      "Closed-form witness value; negative means entanglement is detected.");

  mod.def(
      "oracle_witness",
      [](const std::string& criterion, const std::string& modes, const ModelParams& p, const CoherentInput& in,
         const std::vector<double>& times, int m, int n) {
        py::gil_scoped_release release;
        const OracleTrajectory traj = run_oracle({make_id(criterion, modes, m, n)}, p, in, times);
        std::vector<double> out;
        for (const WitnessValue& v : traj.values[0]) out.push_back(v.value);
        return out;
      },
      py::arg("criterion"), py::arg("modes"), py::arg("params"), py::arg("input"), py::arg("times"),
      py::arg("m") = 1, py::arg("n") = 1, "Witness values from the truncated Fock-space evolution.");

  mod.def("presets", [] {
    std::vector<std::string> names;
    for (const RunConfig& c : presets()) names.push_back(c.name);
    return names;
  });
  mod.def(
      "preset", [](const std::string& name) { return to_python(to_json(preset(name))); }, py::arg("name"),
      "Preset as a config dict.");

  mod.def(
      "sweep",
      [](const py::object& config, unsigned workers) {
        const RunConfig c = config_from_json(to_nlohmann(config));
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = run_sweep(c, workers);
        }
        return to_python(sweep_to_json(r));
      },
      py::arg("config"), py::arg("workers") = 1, "Runs a config dict; returns {'rows': [...], 'summary': [...], ...}.");

  mod.def(
      "sweep_csv",
      [](const py::object& config, unsigned workers) {
        const RunConfig c = config_from_json(to_nlohmann(config));
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_csv(os, run_sweep(c, workers).rows);
        }
        return os.str();
      },
      py::arg("config"), py::arg("workers") = 1, "Same rows as the CLI's CSV output.");
}
