#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mdist/io.hpp"
#include "mdist/matching_distance.hpp"

namespace py = pybind11;
using namespace mdist;

namespace {

using PairList = std::vector<std::pair<double, double>>;

double to_float(const ExtendedReal& v) {
  return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

// Python diagrams are lists of (birth, death) with death = inf for essential
// classes; multiplicity is expressed by repetition.
PersistenceDiagram from_pairs(const PairList& pairs, int degree = 0) {
  PersistenceDiagram d(degree);
  for (const auto& [u, v] : pairs) {
    if (std::isinf(v) && v > 0)
      d.add_essential(u);
    else
      d.add_proper(u, v);
  }
  return d.normalized();
}

PairList to_pairs(const PersistenceDiagram& d) {
  PairList out;
  for (const auto& p : d.points())
    for (int k = 0; k < p.multiplicity; ++k)
      out.emplace_back(p.birth, p.is_proper() ? p.death : std::numeric_limits<double>::infinity());
  return out;
}

std::vector<PairList> diagrams_along(const BifilteredComplex& cx, double a, double b,
                                     int max_degree) {
  std::vector<PairList> out;
  for (const auto& d : compute_diagram(cx, LineParam(a, b), max_degree)) out.push_back(to_pairs(d));
  return out;
}

py::dict report_dict(const EstimateReport& r) {
  py::dict d;
  d["method"] = to_string(r.method);
  d["value"] = to_float(r.value);
  d["realizer"] = py::make_tuple(r.realizer.a, r.realizer.b);
  d["lines"] = r.per_line.size();
  d["slope_one_lines"] = r.slope_one_lines;
  d["u_lines"] = r.u_lines;
  d["witness"] = r.witness;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matching distance of bifiltered complexes by the foliation method";

  py::register_exception<Error>(m, "MdistError", PyExc_ValueError);

  py::class_<BifilteredComplex>(m, "Complex")
      .def(py::init(&BifilteredComplex::from_top_simplices), py::arg("values"), py::arg("simplices"),
           "Face closure of the given top simplices with one (phi1, phi2) pair per vertex.")
      .def_property_readonly("vertex_count", &BifilteredComplex::vertex_count)
      .def_property_readonly("simplex_count", &BifilteredComplex::simplex_count)
      .def_property_readonly("dimension", &BifilteredComplex::dimension)
      .def_property_readonly("values", &BifilteredComplex::values)
      .def("with_values", &BifilteredComplex::with_values, py::arg("values"))
      .def("betti_numbers", &BifilteredComplex::betti_numbers)
      .def("euler_characteristic", &BifilteredComplex::euler_characteristic)
      .def("diagrams", &diagrams_along, py::arg("a"), py::arg("b"), py::arg("max_degree") = -1,
           "Diagrams of the normalized restriction to r_(a,b), one list per degree.");

  py::class_<ExtendedParetoGrid>(m, "ParetoGrid")
      .def_property_readonly("proper_count", &ExtendedParetoGrid::proper_count)
      .def_property_readonly("vertical_count", &ExtendedParetoGrid::vertical_count)
      .def_property_readonly("horizontal_count", &ExtendedParetoGrid::horizontal_count)
      .def("to_text", &write_grid)
      .def_static("from_text", &read_grid, py::arg("text"));

  py::class_<EstimatorConfig>(m, "EstimatorConfig")
      .def(py::init<>())
      .def_readwrite("cbar", &EstimatorConfig::cbar)
      .def_readwrite("resolution_a", &EstimatorConfig::resolution_a)
      .def_readwrite("resolution_b", &EstimatorConfig::resolution_b)
      .def_readwrite("tol", &EstimatorConfig::tol)
      .def_readwrite("epsilon_boundary", &EstimatorConfig::epsilon_boundary)
      .def_readwrite("degree", &EstimatorConfig::degree)
      .def_readwrite("special_resolution", &EstimatorConfig::special_resolution)
      .def_readwrite("special_tol", &EstimatorConfig::special_tol)
      .def_readwrite("cap_special_values", &EstimatorConfig::cap_special_values)
      .def_readwrite("u_lattice_refinement", &EstimatorConfig::u_lattice_refinement);

  m.def(
      "sphere",
      [](int resolution, double radius, std::array<double, 3> c) {
        return make_sphere(resolution, radius, {c[0], c[1], c[2]});
      },
      py::arg("resolution") = 32, py::arg("radius") = 1.0,
      py::arg("center") = std::array<double, 3>{0, 0, 0},
      "UV sphere with the (x, z) projection as vertex values.");
  m.def(
      "torus",
      [](int resolution, double major, double minor, double tilt_x, double tilt_z) {
        return make_torus(resolution, major, minor, {tilt_x, tilt_z});
      },
      py::arg("resolution") = 32, py::arg("major") = 2.0, py::arg("minor") = 0.7,
      py::arg("tilt_x") = 0.0, py::arg("tilt_z") = 0.0);
  m.def(
      "sphere_grid",
      [](double radius, std::array<double, 3> c) {
        return analytic_sphere_grid(radius, {c[0], c[1], c[2]});
      },
      py::arg("radius") = 1.0, py::arg("center") = std::array<double, 3>{0, 0, 0});
  m.def(
      "torus_grid",
      [](double major, double minor, double tilt_x, double tilt_z) {
        return analytic_torus_grid(major, minor, {tilt_x, tilt_z});
      },
      py::arg("major") = 2.0, py::arg("minor") = 0.7, py::arg("tilt_x") = 0.0,
      py::arg("tilt_z") = 0.0);
  m.def("load_mesh", &load_mesh_complex, py::arg("mesh_path"), py::arg("values_path") = "",
        "OFF mesh plus its values sidecar.");

  m.def(
      "bottleneck",
      [](const PairList& d1, const PairList& d2) {
        return to_float(bottleneck(from_pairs(d1), from_pairs(d2)).cost);
      },
      py::arg("first"), py::arg("second"), "Exact bottleneck distance of two diagrams.");
  m.def(
      "point_distance",
      [](std::pair<double, double> p, std::pair<double, double> q) {
        auto point = [](std::pair<double, double> x) {
          return std::isinf(x.second) ? DiagramPoint::essential(x.first)
                                      : DiagramPoint::proper(x.first, x.second);
        };
        return to_float(point_distance(point(p), point(q)));
      },
      py::arg("p"), py::arg("q"));
  m.def("sup_norm_difference", &sup_norm_difference, py::arg("first"), py::arg("second"));
  m.def(
      "line_cost",
      [](const BifilteredComplex& c1, const BifilteredComplex& c2, double a, double b, int degree) {
        return to_float(line_cost(c1, c2, LineParam(a, b), degree).cost);
      },
      py::arg("first"), py::arg("second"), py::arg("a"), py::arg("b"), py::arg("degree") = -1);

  m.def(
      "naive_estimate",
      [](const BifilteredComplex& c1, const BifilteredComplex& c2, const EstimatorConfig& cfg) {
        EstimateReport r;
        {
          py::gil_scoped_release release;
          r = naive_estimate(c1, c2, cfg);
        }
        return report_dict(r);
      },
      py::arg("first"), py::arg("second"), py::arg("config") = EstimatorConfig{});
  m.def(
      "reduced_estimate",
      [](const BifilteredComplex& c1, const BifilteredComplex& c2, const ExtendedParetoGrid& g1,
         const ExtendedParetoGrid& g2, const EstimatorConfig& cfg) {
        return report_dict(reduced_estimate(c1, c2, g1, g2, cfg));
      },
      py::arg("first"), py::arg("second"), py::arg("grid1"), py::arg("grid2"),
      py::arg("config") = EstimatorConfig{});
  m.def(
      "verify",
      [](const BifilteredComplex& c1, const BifilteredComplex& c2, const ExtendedParetoGrid& g1,
         const ExtendedParetoGrid& g2, const EstimatorConfig& cfg) {
        const auto v = verify_main_theorem(c1, c2, g1, g2, cfg);
        py::dict d;
        d["pass"] = v.pass;
        d["tol"] = v.tol;
        d["naive"] = report_dict(v.naive);
        d["reduced"] = report_dict(v.reduced);
        return d;
      },
      py::arg("first"), py::arg("second"), py::arg("grid1"), py::arg("grid2"),
      py::arg("config") = EstimatorConfig{},
      "Checks that the reduced estimate reaches the naive one within config.tol.");
}
