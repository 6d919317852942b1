#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frontlab/curvature.hpp"
#include "frontlab/gallery.hpp"
#include "frontlab/report.hpp"

namespace py = pybind11;
using namespace frontlab;

PYBIND11_MODULE(_frontlab, m) {
    m.doc() = "wave fronts, coherent tangent bundles, and singular curvature";

    py::class_<Vec2d>(m, "Vec2d")
        .def(py::init<>())
        .def(py::init([](double u, double v) { return Vec2d{u, v}; }))
        .def_readwrite("u", &Vec2d::u)
        .def_readwrite("v", &Vec2d::v)
        .def("__repr__", [](Vec2d p) {
            return "Vec2d(" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")";
        });

    py::enum_<Verdict>(m, "Verdict")
        .value("A2", Verdict::A2)
        .value("A3", Verdict::A3)
        .value("NonDegeneratePeak", Verdict::NonDegeneratePeak)
        .value("DegeneratePeak", Verdict::DegeneratePeak)
        .value("IsolatedPeak", Verdict::IsolatedPeak)
        .value("Unclassified", Verdict::Unclassified);

    py::class_<SingularSample>(m, "SingularSample")
        .def_readonly("t", &SingularSample::t)
        .def_readonly("p", &SingularSample::p)
        .def_readonly("lambda_", &SingularSample::lambda)
        .def_readonly("tangent", &SingularSample::tangent)
        .def_readonly("eta", &SingularSample::eta)
        .def_readonly("d_lambda_eta", &SingularSample::dlambda_eta)
        .def_readonly("dtau_dt", &SingularSample::psi_speed);

    py::class_<SingularCurve>(m, "SingularCurve")
        .def_readonly("samples", &SingularCurve::samples)
        .def("closed", &SingularCurve::closed);

    py::class_<SingularPointReport>(m, "SingularPointReport")
        .def_readonly("point", &SingularPointReport::point)
        .def_readonly("verdict", &SingularPointReport::verdict)
        .def_readonly("branch_count", &SingularPointReport::branch_count);

    py::class_<SingularLocus>(m, "SingularLocus")
        .def_readonly("curves", &SingularLocus::curves)
        .def_readonly("points", &SingularLocus::points);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("error", &Estimate::error);

    py::class_<GBReport>(m, "GBReport")
        .def_readonly("KdA", &GBReport::KdA)
        .def_readonly("KdAhat", &GBReport::KdAhat)
        .def_readonly("kappa_s", &GBReport::kappa_s)
        .def_readonly("chi_E", &GBReport::chi_E)
        .def_readonly("P_plus", &GBReport::P_plus)
        .def_readonly("P_minus", &GBReport::P_minus)
        .def_readonly("residual_eq_A", &GBReport::residual_eq_A)
        .def_readonly("residual_eq_B", &GBReport::residual_eq_B)
        .def_readonly("passed", &GBReport::pass);

    py::class_<BundleView, std::shared_ptr<BundleView>>(m, "BundleView")
        .def_property_readonly("name", &BundleView::name)
        .def("lambda_", [](const BundleView& v, double u, double w) {
            return v.lambda({u, w});
        });

    m.def("load", [](const std::string& path) { return make_view(load_spec_file(path)); },
          "load a surface spec file");
    m.def("load_text", [](const std::string& text) { return make_view(load_spec(text)); },
          "load a surface spec from a string");
    m.def("gallery_list", &gallery_list);
    m.def("gallery_spec", &gallery_spec);
    m.def("load_gallery",
          [](const std::string& name) { return make_view(load_spec(gallery_spec(name))); });

    m.def("trace_singular_set",
          [](const BundleView& v) { return trace_singular_set(v); });
    m.def("singular_curvature",
          [](const BundleView& v, const SingularCurve& c) { return singular_curvature(v, c); });
    m.def("verify_global_GB",
          [](const BundleView& v, int grid) { return verify_global_GB(v, grid); },
          py::arg("view"), py::arg("grid") = 128);
    m.def("analyze_report_json", [](const BundleView& v) {
        RunConfig cfg;
        return analyze_report_json(v, trace_singular_set(v), cfg);
    });
}
