#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fracsurf/reference_element.hpp"
#include "fracsurf/types.hpp"

namespace fracsurf {

class Lift;

/// Polyhedral (or bilinear) approximation of a closed curve/surface. Cells
/// are oriented counterclockwise with respect to the outward normal. In
/// ambient dimension 2 the third coordinate of every vertex is zero.
///
/// Meshes are immutable once built; refinement returns a new mesh.
class SurfaceMesh {
 public:
  SurfaceMesh(int dim_ambient, CellKind kind, std::vector<Vec3> vertices,
              std::vector<int> cell_vertices, int level = 0);

  int dim_ambient() const { return dim_ambient_; }
  CellKind cell_kind() const { return kind_; }
  int vertices_per_cell() const { return fracsurf::vertices_per_cell(kind_); }
  int level() const { return level_; }

  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_cells() const { return cells_.size() / vertices_per_cell(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const int> cell(std::size_t c) const {
    return {cells_.data() + c * vertices_per_cell(), static_cast<std::size_t>(vertices_per_cell())};
  }
  const std::vector<int>& cell_vertex_indices() const { return cells_; }

  /// Unique undirected edges (i < j), sorted. For curve meshes these are
  /// the segments themselves.
  std::vector<std::array<int, 2>> edges() const;

  /// Every facet (edge of a surface cell, endpoint of a segment) is shared
  /// by exactly two cells.
  bool is_closed() const;

  /// V - E + F for surfaces, V - E for curves.
  int euler_characteristic() const;

 private:
  int dim_ambient_;
  CellKind kind_;
  std::vector<Vec3> vertices_;
  std::vector<int> cells_;
  int level_;
};

/// Linear or bilinear parametrization F of one cell over its reference cell.
class ElementMap {
 public:
  ElementMap(CellKind kind, std::span<const Vec3> corners);

  CellKind kind() const { return kind_; }
  int reference_dim() const { return fracsurf::reference_dim(kind_); }
  const Vec3& corner(int i) const { return corners_[i]; }

  Vec3 point(const RefPoint& xi) const;
  Jacobian jacobian(const RefPoint& xi) const;

  /// Area (length) element sqrt(det(DF^T DF)) at xi.
  double measure_density(const RefPoint& xi) const;

 private:
  CellKind kind_;
  std::array<Vec3, 4> corners_;
};

ElementMap element_map(const SurfaceMesh& mesh, std::size_t cell);

/// sqrt(det(J^T J)): the area element of a 3x2 map, the length of a 3x1.
double measure_density(const Jacobian& jac);

enum class InitialMesh { CubeQuads, IcosahedronTriangles, CircleSegments };

/// Coarse inscribed mesh of the unit sphere (unit circle for
/// CircleSegments: a square with vertices on the axes, in the z = 0 plane).
SurfaceMesh build_initial_sphere_mesh(InitialMesh kind);

/// Splits every cell into 2^r children at edge midpoints (plus the cell
/// center for quads). New vertices are placed with `lift`.
SurfaceMesh refine_uniform(const SurfaceMesh& mesh, const Lift& lift);

/// build_initial_sphere_mesh followed by `level` uniform refinements.
SurfaceMesh sphere_mesh(InitialMesh kind, int level, const Lift& lift);

struct MeshQuality {
  double h = 0.0;    // max cell diameter
  double c_q = 1.0;  // h / min cell diameter
  double c_J = 1.0;  // bound on DF / h_cell and its pseudoinverse
  int c_v = 0;       // max number of cells sharing a vertex
};

MeshQuality mesh_quality(const SurfaceMesh& mesh);

/// Sum of cell measures, each integrated through F with `order` Gauss points.
double total_measure(const SurfaceMesh& mesh, int order = 4);

/// Diameter of a cell: largest distance between two of its vertices.
double cell_diameter(const SurfaceMesh& mesh, std::size_t cell);

}  // namespace fracsurf
