#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracsurf/mesh_io.hpp"
#include "fracsurf/study.hpp"

namespace py = pybind11;
using namespace fracsurf;

namespace {

// Mesh plus FE matrices of one refinement level; owns everything the
// space points to.
class Discretization {
 public:
  Discretization(const std::string& mesh, int level, int quad)
      : mesh_(study_mesh(parse_mesh_kind(mesh), level)),
        space_(mesh_),
        mass_(assemble_mass(space_, quad)),
        stiffness_(assemble_stiffness(space_, quad)),
        quad_(quad) {}

  const SurfaceMesh& mesh() const { return mesh_; }
  const SparseSpd& mass() const { return mass_; }
  const SparseSpd& stiffness() const { return stiffness_; }

  Eigen::MatrixXd vertices() const {
    Eigen::MatrixXd v(mesh_.n_vertices(), 3);
    for (std::size_t i = 0; i < mesh_.n_vertices(); ++i) v.row(i) = mesh_.vertex(i).transpose();
    return v;
  }

  Eigen::MatrixXi cells() const {
    const int nv = mesh_.vertices_per_cell();
    Eigen::MatrixXi c(mesh_.n_cells(), nv);
    for (std::size_t i = 0; i < mesh_.n_cells(); ++i) {
      for (int k = 0; k < nv; ++k) c(i, k) = mesh_.cell(i)[k];
    }
    return c;
  }

  Eigen::VectorXd load(const std::string& lift, const std::string& data) const {
    return assemble_load_sigma(space_, make_lift(parse_lift_kind(lift)), data_function(parse_data(data)), quad_);
  }

  Eigen::VectorXd load_fn(const std::string& lift, const std::function<double(const Vec3&)>& f) const {
    return assemble_load_sigma(space_, make_lift(parse_lift_kind(lift)), f, quad_);
  }

  Eigen::VectorXd fractional_inverse(const Eigen::VectorXd& b, double s, double k, const std::string& solver) const {
    StudyConfig c;
    parse_solver(solver, c);
    Eigen::VectorXd u;
    {
      py::gil_scoped_release release;
      u = apply_fractional_inverse(SincRule(s, k), mass_, stiffness_, b, c.solver_options()).coefficients;
    }
    return u;
  }

  py::dict errors(const Eigen::VectorXd& u, double s, const std::string& lift, const std::string& data,
                  int trunc) const {
    const ZonalSeries series = reference_series(parse_data(data), s, trunc);
    ErrorNorms e;
    {
      py::gil_scoped_release release;
      e = error_norms(mesh_, make_lift(parse_lift_kind(lift)), u, exact_field(series));
    }
    py::dict d;
    d["l2"] = e.l2;
    d["h1_seminorm"] = e.h1_seminorm;
    d["h1"] = e.h1;
    return d;
  }

  double sigma_deviation(const std::string& lift) const {
    return sigma_sup_deviation(make_lift(parse_lift_kind(lift)), mesh_, kDiagnosticOrder);
  }

 private:
  SurfaceMesh mesh_;
  FeSpace space_;
  SparseSpd mass_;
  SparseSpd stiffness_;
  int quad_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral fractional Laplace-Beltrami solver on the unit sphere";

  py::class_<Discretization>(m, "Discretization")
      .def(py::init<const std::string&, int, int>(), py::arg("mesh") = "cube", py::arg("level") = 2,
           py::arg("quad") = kAssemblyOrder)
      .def_property_readonly("n_dofs", [](const Discretization& d) { return d.mesh().n_vertices(); })
      .def_property_readonly("vertices", &Discretization::vertices)
      .def_property_readonly("cells", &Discretization::cells)
      .def_property_readonly("mass", [](const Discretization& d) { return d.mass().matrix(); })
      .def_property_readonly("stiffness", [](const Discretization& d) { return d.stiffness().matrix(); })
      .def("area", [](const Discretization& d) { return total_measure(d.mesh()); })
      .def("load", &Discretization::load, py::arg("lift") = "sdf", py::arg("data") = "step")
      .def("load_function", &Discretization::load_fn, py::arg("lift"), py::arg("f"))
      .def("fractional_inverse", &Discretization::fractional_inverse, py::arg("b"), py::arg("s"),
           py::arg("k") = 0.15, py::arg("solver") = "direct")
      .def("errors", &Discretization::errors, py::arg("u"), py::arg("s"), py::arg("lift") = "sdf",
           py::arg("data") = "step", py::arg("trunc") = kDefaultTruncation)
      .def("sigma_deviation", &Discretization::sigma_deviation, py::arg("lift") = "sdf")
      .def("write_vtk", [](const Discretization& d, const std::string& path, const Eigen::VectorXd& u) {
        write_vtk(d.mesh(), path, {{"u", &u}});
      });

  m.def("choose_truncation", [](double s, double k) {
    const Truncation t = choose_truncation(s, k);
    return std::make_pair(t.M, t.N);
  });
  m.def("sinc_apply", [](double s, double k, double lam) { return scalar_apply(SincRule(s, k), lam); },
        py::arg("s"), py::arg("k"), py::arg("lam"));
  m.def("exact_solution", &exact_solution, py::arg("theta"), py::arg("s"), py::arg("trunc") = kDefaultTruncation);
  m.def("step_coefficients", &step_coefficients, py::arg("trunc"));

  m.def("default_config", [] { return config_to_json(StudyConfig{}); });
  m.def("normalize_config", [](const std::string& text) { return config_to_json(config_from_json(text)); });
  m.def("run_convergence", [](const std::string& text) {
    const StudyConfig c = config_from_json(text);
    py::gil_scoped_release release;
    return convergence_json(run_convergence(c));
  });
  m.def("run_sigma_study", [](const std::string& text) {
    const StudyConfig c = config_from_json(text);
    return sigma_study_csv(run_sigma_study(c));
  });

  m.attr("__version__") = "0.1.0";
}
