#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "regdist/approx.hpp"
#include "regdist/apps.hpp"
#include "regdist/error.hpp"
#include "regdist/run.hpp"
#include "regdist/scene.hpp"

namespace py = pybind11;
using namespace regdist;

namespace {

py::array_t<double> as_array(const std::vector<Point>& pts, int n) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(n)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int j = 0; j < n; ++j) m(i, j) = pts[i][j];
  return out;
}

std::vector<Point> as_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("expected an (m, n) array");
  auto r = a.unchecked<2>();
  std::vector<Point> pts(r.shape(0), Point(r.shape(1)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t j = 0; j < r.shape(1); ++j) pts[i][j] = r(i, j);
  return pts;
}

py::dict summary(const CertificateReport& rep) {
  py::dict d;
  d["verdict"] = outcome_name(rep.verdict());
  d["checks"] = rep.checks();
  d["failures"] = rep.failures();
  d["ambiguous"] = rep.ambiguous();
  d["worst_ratio"] = rep.worst_ratio();
  d["notes"] = rep.notes();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regularized distance functions with checked derivative bounds";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error)(py::str(e.what()));
      exc.attr("code") = std::string(error_name(e.code()));
      exc.attr("exit_code") = exit_code(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Scene>(m, "Scene")
      .def_readonly("dim", &Scene::n)
      .def_readwrite("p", &Scene::p)
      .def_readwrite("kappa", &Scene::kappa)
      .def_readwrite("t", &Scene::t_list)
      .def_readwrite("eps", &Scene::eps_list)
      .def_property(
          "resolution", [](const Scene& s) { return s.grid.resolution; },
          [](Scene& s, int r) { s.grid.resolution = r; })
      .def_property_readonly("strata", [](const Scene& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& d : s.strata) out.emplace_back(d.id, d.kind);
        return out;
      })
      .def("dump", &dump_scene)
      .def("__eq__", [](const Scene& a, const Scene& b) { return a == b; });

  m.def("parse_scene", &parse_scene, py::arg("text"), py::arg("base_dir") = ".");
  m.def("load_scene", [](const std::filesystem::path& p) { return load_scene(p.string()); }, py::arg("path"));

  m.def(
      "run",
      [](const std::string& name, const Scene& scene, const std::string& out_dir, bool svg) {
        RunOptions opt;
        opt.out_dir = out_dir;
        opt.svg = svg;
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_subcommand(name, scene, opt);
        }
        py::dict d = summary(r.report);
        d["exit_status"] = r.exit_status;
        d["fitted"] = r.fitted;
        d["files"] = r.files;
        if (r.convergence) {
          std::vector<std::pair<double, double>> rows;
          for (const auto& row : r.convergence->rows) rows.emplace_back(row.t, row.hausdorff);
          d["convergence"] = rows;
        }
        return d;
      },
      py::arg("subcommand"), py::arg("scene"), py::arg("out_dir") = "", py::arg("svg") = false,
      "Runs one CLI subcommand in process.");

  py::class_<RegularizedDistance>(m, "RegularizedDistance")
      .def_readonly("A_claimed", &RegularizedDistance::A_claimed)
      .def_readonly("A_fitted", &RegularizedDistance::A_fitted)
      .def_readonly("B_fitted", &RegularizedDistance::B_fitted)
      .def_property_readonly("report", [](const RegularizedDistance& rd) { return summary(rd.report); })
      .def(
          "__call__", [](const RegularizedDistance& rd, const Point& x) { return rd.f().field.value(x); }, py::arg("x"))
      .def(
          "derivative",
          [](const RegularizedDistance& rd, const Point& x, const std::vector<int>& alpha) {
            return rd.f().field.derivative(x, MultiIndex(alpha));
          },
          py::arg("x"), py::arg("alpha"))
      .def(
          "values",
          [](const RegularizedDistance& rd, const py::array_t<double>& pts) {
            std::vector<double> out;
            for (const auto& x : as_points(pts)) out.push_back(rd.f().field.value(x));
            return out;
          },
          py::arg("points"))
      .def(
          "level_set",
          [](const RegularizedDistance& rd, double t, const std::vector<double>& lo, const std::vector<double>& hi,
             int resolution) {
            auto ls = level_set_extract(rd.f().field, t, Box{lo, hi}, resolution);
            return as_array(ls.points, static_cast<int>(lo.size()));
          },
          py::arg("t"), py::arg("lo"), py::arg("hi"), py::arg("resolution"));

  m.def(
      "regularized_distance",
      [](const Scene& s) {
        py::gil_scoped_release release;
        return regularized_distance(build_stratification(s), s.p, s.kappa, s.grid);
      },
      py::arg("scene"), "Builds f with A⁻¹d ≤ f ≤ A d and the derivative bounds checked on the scene grid.");

  m.def("distance_to_w", [](const Scene& s, const Point& x) { return build_w(s)->distance(x); }, py::arg("scene"),
        py::arg("x"));

  m.def(
      "lambda_eps",
      [](const py::array_t<double>& samples, double eps, const std::vector<double>& lo, const std::vector<double>& hi,
         int resolution) { return lambda_eps(as_points(samples), eps, Box{lo, hi}, resolution); },
      py::arg("samples"), py::arg("eps"), py::arg("lo"), py::arg("hi"), py::arg("resolution"));

  m.attr("subcommands") = kSubcommands;
}
