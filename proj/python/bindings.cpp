// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cfm/cli.hpp"
#include "cfm/conformal.hpp"
#include "cfm/error.hpp"
#include "cfm/mercator.hpp"
#include "cfm/multiply_connected.hpp"

namespace py = pybind11;
using namespace cfm;

namespace {

py::dict report_dict(const ModulusReport& r) {
  py::dict d;
  d["M_Q"] = r.M_Q;
  d["M_conj"] = r.M_conj;
  d["reci"] = r.reci;
  d["est_err_Q"] = r.est_err_Q;
  d["est_err_conj"] = r.est_err_conj;
  d["dofs"] = r.dofs;
  d["p"] = r.p;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conformal moduli of quadrilaterals on parameterized surfaces";

  static py::handle error = py::exception<Error>(m, "CfmError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Surface>(m, "Surface")
      .def_property_readonly("name", &Surface::name)
      .def("eval", [](const Surface& s, double u, double v) { return Eigen::Vector3d(s.eval({u, v})); })
      .def("jacobian", [](const Surface& s, double u, double v) { return Jacobian(s.jacobian({u, v})); })
      .def("metric",
           [](const Surface& s, double u, double v) {
             const MetricData md = metric_at(s, {u, v});
             py::dict d;
             d["G"] = Eigen::Matrix2d(md.G);
             d["A"] = Eigen::Matrix2d(md.A);
             d["sqrt_det_G"] = md.sqrt_det_G;
             return d;
           })
      .def("scaled", &Surface::scaled);

  m.def("make_surface", &make_catalog_surface, py::arg("name"), py::arg("params") = std::vector<double>{});
  m.def("surface_names", &catalog_surface_names);
  m.def("domain_names", &catalog_domain_names);
  m.def("catalog", &catalog_text);
  m.def("parse_number", &parse_number);
  m.def("mercator_reference",
        [](double lambda, double phi) { return Eigen::Vector2d(mercator_reference(lambda, phi)); });

  // Config text in the CLI format; nothing is written to disk.
  m.def(
      "run",
      [](const std::string& text, const std::string& mode) {
        const RunOutput out = run_experiment(parse_config(text, mode));
        py::dict files;
        for (const auto& [path, content] : out.files) files[py::str(path)] = content;
        return py::make_tuple(out.report, files);
      },
      py::arg("config"), py::arg("mode") = "");

  m.def(
      "modulus_pair",
      [](const std::string& text, std::optional<int> p) {
        const ExperimentConfig cfg = parse_config(text, "modulus");
        const Experiment ex = build_experiment(cfg);
        PairResult r;
        {
          py::gil_scoped_release release;
          r = modulus_pair(ex.quad, ex.recipe, p.value_or(cfg.ps.back()));
        }
        return report_dict(r.report);
      },
      py::arg("config"), py::arg("p") = py::none());

  m.def(
      "convergence",
      [](const std::string& text) {
        const ExperimentConfig cfg = parse_config(text, "convergence");
        const Experiment ex = build_experiment(cfg);
        std::vector<ModulusReport> reps;
        {
          py::gil_scoped_release release;
          int pmax = 0;
          for (int p : cfg.ps) pmax = std::max(pmax, p);
          reps = convergence_study(ex.quad, build_mesh(ex.quad.domain, ex.recipe, pmax), cfg.ps);
        }
        py::list out;
        for (const auto& r : reps) out.append(report_dict(r));
        return out;
      },
      py::arg("config"));
}
