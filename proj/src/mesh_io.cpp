#include "fracsurf/mesh_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace fracsurf {

namespace {

int vtk_cell_type(CellKind kind) {
  switch (kind) {
    case CellKind::Segment:
      return 3;
    case CellKind::Triangle:
      return 5;
    case CellKind::Quad:
      return 9;
  }
  return 0;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_vtk(const SurfaceMesh& mesh, const std::string& path, const std::vector<PointField>& point_data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  out << "# vtk DataFile Version 3.0\n";
  out << "fracsurf level " << mesh.level() << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec3& v : mesh.vertices()) out << fmt(v.x()) << ' ' << fmt(v.y()) << ' ' << fmt(v.z()) << '\n';
  const int nv = mesh.vertices_per_cell();
  out << "CELLS " << mesh.n_cells() << ' ' << mesh.n_cells() * (nv + 1) << '\n';
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    out << nv;
    for (int v : mesh.cell(c)) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) out << vtk_cell_type(mesh.cell_kind()) << '\n';
  if (!point_data.empty()) {
    out << "POINT_DATA " << mesh.n_vertices() << '\n';
    for (const PointField& field : point_data) {
      if (field.values == nullptr || static_cast<std::size_t>(field.values->size()) != mesh.n_vertices()) {
        throw std::invalid_argument("write_vtk: field '" + field.name + "' does not match the mesh");
      }
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < field.values->size(); ++i) out << fmt((*field.values)[i]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write_vtk: write failed for " + path);
}

std::optional<CellLocation> locate_on_surface(const SurfaceMesh& mesh, const Lift& lift, const Vec3& y) {
  const RefPoint center = reference_center(mesh.cell_kind());
  const int r = reference_dim(mesh.cell_kind());
  std::optional<CellLocation> best;
  double best_excess = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const ElementMap emap = element_map(mesh, c);
    const double diam = cell_diameter(mesh, c);
    if ((lift.point(emap.point(center)) - y).norm() > 1.5 * diam) continue;
    RefPoint xi = center;
    bool converged = false;
    for (int iter = 0; iter < 30; ++iter) {
      const Vec3 residual = lift.point(emap.point(xi)) - y;
      if (residual.norm() < 1e-14) {
        converged = true;
        break;
      }
      const Jacobian jac = composite_jacobian(lift, emap, xi);
      const Eigen::MatrixXd normal = jac.transpose() * jac;
      const Eigen::VectorXd step = normal.ldlt().solve(jac.transpose() * residual);
      xi.head(r) -= step;
      if (step.norm() < 1e-15) {
        converged = residual.norm() < 1e-10;
        break;
      }
    }
    if (!converged) continue;
    // Prefer a cell containing xi; otherwise the one that misses by least.
    double excess = 0.0;
    for (int d = 0; d < r; ++d) excess = std::max({excess, -xi[d], xi[d] - 1.0});
    if (mesh.cell_kind() == CellKind::Triangle) excess = std::max(excess, xi[0] + xi[1] - 1.0);
    if (excess < best_excess) {
      best_excess = excess;
      best = CellLocation{c, xi};
      if (excess <= 0.0) break;
    }
  }
  if (best && best_excess > 1e-8) return std::nullopt;
  return best;
}

std::vector<TraceSample> geodesic_trace(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                                        const SurfaceFunction& exact, int samples) {
  if (samples < 2) throw std::invalid_argument("geodesic_trace: need at least two samples");
  if (mesh.dim_ambient() != 3) throw std::invalid_argument("geodesic_trace: surface meshes only");
  std::vector<TraceSample> trace;
  trace.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    TraceSample sample;
    sample.theta = std::numbers::pi * i / (samples - 1);
    const Vec3 y(std::sin(sample.theta), 0.0, std::cos(sample.theta));
    const auto loc = locate_on_surface(mesh, lift, y);
    if (!loc) throw std::runtime_error("geodesic_trace: no cell found at theta = " + fmt(sample.theta));
    sample.value = evaluate(mesh, U, loc->cell, loc->xi).value;
    sample.exact = exact ? exact(y) : std::numeric_limits<double>::quiet_NaN();
    trace.push_back(sample);
  }
  return trace;
}

void write_trace_csv(const std::vector<TraceSample>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "theta,u_h,u_exact\n";
  for (const TraceSample& s : trace) out << fmt(s.theta) << ',' << fmt(s.value) << ',' << fmt(s.exact) << '\n';
  if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

}  // namespace fracsurf
