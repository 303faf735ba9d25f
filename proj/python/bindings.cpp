#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbrouwer/error.hpp"
#include "qbrouwer/geometry.hpp"
#include "qbrouwer/maps.hpp"
#include "qbrouwer/oracle.hpp"
#include "qbrouwer/pipeline.hpp"
#include "qbrouwer/report.hpp"

namespace py = pybind11;
using namespace qbrouwer;

namespace {

// Python users pass points as rows; the library stores them as columns.
using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PointSet rows_to_points(const RowPoints& rows) { return PointSet(rows.transpose()); }

py::object to_python(const report::Json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

MapFn resolve_map(const py::object& f) {
  if (py::isinstance<ExtremalMap>(f)) return as_map(f.cast<const ExtremalMap&>());
  if (py::isinstance<StepMap1D>(f)) return as_map(f.cast<const StepMap1D&>());
  if (!PyCallable_Check(f.ptr())) throw py::type_error("map must be an ExtremalMap, a StepMap1D or a callable");
  return [f](const Vector& x) {
    py::gil_scoped_acquire gil;
    return f(x).cast<Vector>();
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Approximate fixed points of eps-continuous self-maps of the unit ball";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.attr("TOL_GEOM") = kTolGeom;

  m.def("jung_radius", &jung_radius, py::arg("n"));
  m.def(
      "regular_simplex_vertices",
      [](int n) -> RowPoints { return regular_simplex_vertices(n).matrix().transpose(); }, py::arg("n"),
      "Vertices of the inscribed regular n-simplex, one per row.");
  m.def(
      "diameter", [](const RowPoints& rows) { return rows_to_points(rows).diameter(); }, py::arg("points"));
  m.def(
      "min_enclosing_ball",
      [](const RowPoints& rows) {
        const Ball b = min_enclosing_ball(rows_to_points(rows));
        return py::make_tuple(Vector(b.center), b.radius);
      },
      py::arg("points"));
  m.def(
      "jung_nearest",
      [](const RowPoints& rows, std::vector<double> weights) {
        const NearestSupport s = jung_nearest(ConvexCombination(rows_to_points(rows), std::move(weights)));
        return py::make_tuple(s.index, s.distance);
      },
      py::arg("points"), py::arg("weights"));

  py::class_<StepMap1D>(m, "StepMap1D")
      .def(py::init<double>(), py::arg("eps"))
      .def_property_readonly("eps", &StepMap1D::eps)
      .def("__call__", py::overload_cast<double>(&StepMap1D::operator(), py::const_), py::arg("x"))
      .def("image_diameter", [](const StepMap1D& s) { return image_diameter(s); });

  py::class_<ExtremalMap>(m, "ExtremalMap")
      .def(py::init<int, double>(), py::arg("n"), py::arg("eps"))
      .def_property_readonly("dim", &ExtremalMap::dim)
      .def_property_readonly("eps", &ExtremalMap::eps)
      .def_property_readonly("image_radius", &ExtremalMap::image_radius)
      .def_property_readonly("vertices",
                             [](const ExtremalMap& e) -> RowPoints { return e.vertices().matrix().transpose(); })
      .def("voronoi_index", &ExtremalMap::voronoi_index, py::arg("x"))
      .def("__call__", &ExtremalMap::operator(), py::arg("x"))
      .def("image_diameter", [](const ExtremalMap& e) { return image_diameter(e); });

  m.def(
      "run_pipeline",
      [](const py::object& f, int n, double eps, double eps_prime, std::size_t budget, double fp_tol) {
        PipelineOptions options;
        options.budget = budget;
        options.fp_tol = fp_tol;
        return to_python(report::to_json(run_pipeline(resolve_map(f), n, eps, eps_prime, options)));
      },
      py::arg("f"), py::arg("n"), py::arg("eps"), py::arg("eps_prime"), py::arg("budget") = kDefaultBudget,
      py::arg("fp_tol") = 1e-10,
      "Certified eps'-fixed point of an eps-continuous self-map of the n-ball, as a report dict.");

  m.def(
      "tightness_report",
      [](int n, double eps, int points_per_axis) {
        return to_python(report::to_json(tightness_report(n, eps, GridSpec{n, points_per_axis})));
      },
      py::arg("n"), py::arg("eps"), py::arg("points_per_axis") = 201);

  m.def(
      "jung_random_test",
      [](int n, int trials, int points_per_set, std::uint64_t seed) {
        return to_python(report::to_json(jung_random_test(n, trials, points_per_set, seed)));
      },
      py::arg("n"), py::arg("trials"), py::arg("points_per_set") = 10, py::arg("seed") = detail::kDefaultSeed);
}
