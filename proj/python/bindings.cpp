#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmlab/counterexample.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/experiments.hpp"
#include "pmlab/nonlinearity.hpp"

namespace py = pybind11;
using nlohmann::json;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perona-Malik laboratory core";

  // translators are tried newest first, so the base class goes in first
  auto& base = py::register_exception<pmlab::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<pmlab::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<pmlab::RangeError>(m, "RangeError", base.ptr());

  py::class_<pmlab::NonlinearityProfile>(m, "NonlinearityProfile")
      .def_static("perona_malik", &pmlab::NonlinearityProfile::perona_malik)
      .def_static("tabulated", &pmlab::NonlinearityProfile::tabulated, py::arg("sigma"), py::arg("phi"),
                  py::arg("name") = "tabulated")
      .def_static("from_spec", &pmlab::NonlinearityProfile::from_spec)
      .def_property_readonly("name", &pmlab::NonlinearityProfile::name)
      .def("phi", &pmlab::NonlinearityProfile::phi, py::arg("s"), py::arg("order") = 0);

  py::class_<pmlab::DerivedConstants>(m, "DerivedConstants")
      .def_readonly("G", &pmlab::DerivedConstants::G)
      .def_readonly("A", &pmlab::DerivedConstants::A)
      .def_readonly("k0", &pmlab::DerivedConstants::k0)
      .def_readonly("r2", &pmlab::DerivedConstants::r2);

  m.def("constants", &pmlab::constants, py::arg("profile"), py::arg("r2"));
  m.def("coeff_g", &pmlab::coeff_g);
  m.def("coeff_g_closed_pm", &pmlab::coeff_g_closed_pm);
  m.def("h_inverse", &pmlab::h_inverse);
  m.def("hypotheses_hold", [](const pmlab::NonlinearityProfile& p, int n) { return pmlab::check_hypotheses(p, n).all(); },
        py::arg("profile"), py::arg("sample_count") = 2048);

  m.def("find_min_n", &pmlab::find_min_n, py::arg("profile"), py::arg("n_max") = 50);
  m.def("convexity_margin", [](int n) { return pmlab::convexity_margin(pmlab::datum_from_n(n)); });
  m.def("vt_origin", [](const pmlab::NonlinearityProfile& p, int n) { return pmlab::vt_origin(pmlab::datum_from_n(n), p); });

  m.def("scenario_names", &pmlab::scenario_names);
  m.def("criteria_for", &pmlab::criteria_for);
  m.def("_default_config", [](const std::string& s) { return pmlab::default_config(s).dump(); });
  m.def("_run_scenario", [](const std::string& cfg) {
    pmlab::ScenarioReport r;
    {
      py::gil_scoped_release release;
      r = pmlab::run_scenario(json::parse(cfg));
    }
    json j = r.to_json();
    j["output_dir"] = r.output_dir.string();
    return j.dump();
  });
}
