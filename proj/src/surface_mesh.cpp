#include "fracsurf/surface_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fracsurf/lift.hpp"

namespace fracsurf {

namespace {

std::array<int, 2> sorted_edge(int a, int b) { return a < b ? std::array{a, b} : std::array{b, a}; }

// Facets of a cell: consecutive vertex pairs for polygons, endpoints for segments.
template <class Fn>
void for_each_cell_edge(const SurfaceMesh& mesh, std::size_t c, Fn&& fn) {
  const auto v = mesh.cell(c);
  if (mesh.cell_kind() == CellKind::Segment) {
    fn(v[0], v[1]);
    return;
  }
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) fn(v[i], v[(i + 1) % n]);
}

}  // namespace

SurfaceMesh::SurfaceMesh(int dim_ambient, CellKind kind, std::vector<Vec3> vertices,
                         std::vector<int> cell_vertices, int level)
    : dim_ambient_(dim_ambient),
      kind_(kind),
      vertices_(std::move(vertices)),
      cells_(std::move(cell_vertices)),
      level_(level) {
  if (dim_ambient_ != 2 && dim_ambient_ != 3) {
    throw std::invalid_argument("SurfaceMesh: ambient dimension must be 2 or 3");
  }
  if ((dim_ambient_ == 2) != (kind_ == CellKind::Segment)) {
    throw std::invalid_argument("SurfaceMesh: segments live in 2D, triangles and quads in 3D");
  }
  if (level_ < 0) throw std::invalid_argument("SurfaceMesh: negative level");
  const int nv = vertices_per_cell();
  if (cells_.empty() || cells_.size() % nv != 0) {
    throw std::invalid_argument("SurfaceMesh: cell index list has the wrong length");
  }
  for (const Vec3& p : vertices_) {
    if (!p.allFinite()) throw std::invalid_argument("SurfaceMesh: non-finite vertex");
    if (dim_ambient_ == 2 && p.z() != 0.0) {
      throw std::invalid_argument("SurfaceMesh: 2D vertices must have zero z coordinate");
    }
  }
  for (std::size_t c = 0; c < n_cells(); ++c) {
    const auto v = cell(c);
    for (int i = 0; i < nv; ++i) {
      if (v[i] < 0 || static_cast<std::size_t>(v[i]) >= vertices_.size()) {
        throw std::invalid_argument("SurfaceMesh: cell " + std::to_string(c) +
                                    " references a missing vertex");
      }
      for (int j = 0; j < i; ++j) {
        if (v[i] == v[j]) {
          throw std::invalid_argument("SurfaceMesh: cell " + std::to_string(c) +
                                      " repeats a vertex");
        }
      }
    }
    const ElementMap emap = element_map(*this, c);
    const double scale = cell_diameter(*this, c);
    const double dens = emap.measure_density(reference_center(kind_));
    const double expected = kind_ == CellKind::Segment ? scale : scale * scale;
    if (!(dens > 1e-12 * expected)) {
      throw std::invalid_argument("SurfaceMesh: cell " + std::to_string(c) + " is degenerate");
    }
  }
}

std::vector<std::array<int, 2>> SurfaceMesh::edges() const {
  std::vector<std::array<int, 2>> out;
  out.reserve(cells_.size());
  for (std::size_t c = 0; c < n_cells(); ++c) {
    for_each_cell_edge(*this, c, [&](int a, int b) { out.push_back(sorted_edge(a, b)); });
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool SurfaceMesh::is_closed() const {
  if (kind_ == CellKind::Segment) {
    std::vector<int> count(vertices_.size(), 0);
    for (int v : cells_) ++count[v];
    return std::all_of(count.begin(), count.end(), [](int n) { return n == 2; });
  }
  std::map<std::array<int, 2>, int> count;
  for (std::size_t c = 0; c < n_cells(); ++c) {
    for_each_cell_edge(*this, c, [&](int a, int b) { ++count[sorted_edge(a, b)]; });
  }
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

int SurfaceMesh::euler_characteristic() const {
  const int v = static_cast<int>(n_vertices());
  const int e = static_cast<int>(edges().size());
  if (kind_ == CellKind::Segment) return v - e;
  return v - e + static_cast<int>(n_cells());
}

ElementMap::ElementMap(CellKind kind, std::span<const Vec3> corners) : kind_(kind) {
  const int n = fracsurf::vertices_per_cell(kind);
  if (static_cast<int>(corners.size()) != n) {
    throw std::invalid_argument("ElementMap: wrong number of corners");
  }
  for (int i = 0; i < 4; ++i) corners_[i] = i < n ? corners[i] : Vec3::Zero();
}

Vec3 ElementMap::point(const RefPoint& xi) const {
  const ShapeValues phi = shape_values(kind_, xi);
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < fracsurf::vertices_per_cell(kind_); ++i) x += phi[i] * corners_[i];
  return x;
}

Jacobian ElementMap::jacobian(const RefPoint& xi) const {
  const ShapeGradients g = shape_gradients(kind_, xi);
  const int r = reference_dim();
  Jacobian jac(3, r);
  jac.setZero();
  for (int i = 0; i < fracsurf::vertices_per_cell(kind_); ++i) {
    for (int d = 0; d < r; ++d) jac.col(d) += g(d, i) * corners_[i];
  }
  return jac;
}

double ElementMap::measure_density(const RefPoint& xi) const {
  return fracsurf::measure_density(jacobian(xi));
}

double measure_density(const Jacobian& jac) {
  if (jac.cols() == 1) return jac.col(0).norm();
  return jac.col(0).cross(jac.col(1)).norm();
}

ElementMap element_map(const SurfaceMesh& mesh, std::size_t cell) {
  const auto v = mesh.cell(cell);
  std::array<Vec3, 4> corners;
  for (std::size_t i = 0; i < v.size(); ++i) corners[i] = mesh.vertex(v[i]);
  return ElementMap(mesh.cell_kind(), std::span<const Vec3>(corners.data(), v.size()));
}

SurfaceMesh build_initial_sphere_mesh(InitialMesh kind) {
  switch (kind) {
    case InitialMesh::CubeQuads: {
      // Vertex index = (x > 0) + 2 (y > 0) + 4 (z > 0).
      std::vector<Vec3> vertices;
      const double a = 1.0 / std::sqrt(3.0);
      for (int i = 0; i < 8; ++i) {
        vertices.emplace_back((i & 1) ? a : -a, (i & 2) ? a : -a, (i & 4) ? a : -a);
      }
      std::vector<int> cells = {1, 3, 7, 5,   // +x
                                0, 4, 6, 2,   // -x
                                2, 6, 7, 3,   // +y
                                0, 1, 5, 4,   // -y
                                4, 5, 7, 6,   // +z
                                0, 2, 3, 1};  // -z
      return SurfaceMesh(3, CellKind::Quad, std::move(vertices), std::move(cells));
    }
    case InitialMesh::IcosahedronTriangles: {
      const double phi = std::numbers::phi;
      std::vector<Vec3> vertices;
      for (int s1 : {-1, 1}) {
        for (int s2 : {-1, 1}) {
          vertices.emplace_back(0.0, s1, s2 * phi);
          vertices.emplace_back(s1, s2 * phi, 0.0);
          vertices.emplace_back(s2 * phi, 0.0, s1);
        }
      }
      // Faces are the triples at mutual distance 2 (the edge length).
      std::vector<int> cells;
      const auto adjacent = [&](int i, int j) {
        return std::abs((vertices[i] - vertices[j]).norm() - 2.0) < 1e-9;
      };
      for (int i = 0; i < 12; ++i) {
        for (int j = i + 1; j < 12; ++j) {
          for (int k = j + 1; k < 12; ++k) {
            if (!adjacent(i, j) || !adjacent(j, k) || !adjacent(i, k)) continue;
            const Vec3 n = (vertices[j] - vertices[i]).cross(vertices[k] - vertices[i]);
            const Vec3 c = vertices[i] + vertices[j] + vertices[k];
            if (n.dot(c) > 0) {
              cells.insert(cells.end(), {i, j, k});
            } else {
              cells.insert(cells.end(), {i, k, j});
            }
          }
        }
      }
      for (Vec3& v : vertices) v.normalize();
      return SurfaceMesh(3, CellKind::Triangle, std::move(vertices), std::move(cells));
    }
    case InitialMesh::CircleSegments: {
      std::vector<Vec3> vertices = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
      std::vector<int> cells = {0, 1, 1, 2, 2, 3, 3, 0};
      return SurfaceMesh(2, CellKind::Segment, std::move(vertices), std::move(cells));
    }
  }
  throw std::invalid_argument("build_initial_sphere_mesh: unknown mesh kind");
}

SurfaceMesh refine_uniform(const SurfaceMesh& mesh, const Lift& lift) {
  if (lift.dim() != mesh.dim_ambient()) {
    throw std::invalid_argument("refine_uniform: lift and mesh dimensions differ");
  }
  std::vector<Vec3> vertices = mesh.vertices();
  std::map<std::array<int, 2>, int> midpoint;

  const auto place = [&](const Vec3& x, const std::string& where) {
    try {
      vertices.push_back(lift_point(lift, x));
    } catch (const LiftDomainError& e) {
      throw LiftDomainError("refine_uniform: " + where + " of level " +
                            std::to_string(mesh.level()) + " mesh cannot be lifted: " + e.what());
    }
    return static_cast<int>(vertices.size()) - 1;
  };
  const auto mid = [&](int a, int b) {
    const auto key = sorted_edge(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const int id = place(0.5 * (mesh.vertex(a) + mesh.vertex(b)),
                         "midpoint of edge (" + std::to_string(key[0]) + "," +
                             std::to_string(key[1]) + ")");
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<int> cells;
  cells.reserve(mesh.cell_vertex_indices().size() * (mesh.cell_kind() == CellKind::Segment ? 2 : 4));
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto v = mesh.cell(c);
    switch (mesh.cell_kind()) {
      case CellKind::Segment: {
        const int m = mid(v[0], v[1]);
        cells.insert(cells.end(), {v[0], m, m, v[1]});
        break;
      }
      case CellKind::Triangle: {
        const int ab = mid(v[0], v[1]);
        const int bc = mid(v[1], v[2]);
        const int ca = mid(v[2], v[0]);
        cells.insert(cells.end(), {v[0], ab, ca, ab, v[1], bc, ca, bc, v[2], ab, bc, ca});
        break;
      }
      case CellKind::Quad: {
        const int ab = mid(v[0], v[1]);
        const int bc = mid(v[1], v[2]);
        const int cd = mid(v[2], v[3]);
        const int da = mid(v[3], v[0]);
        const Vec3 center =
            0.25 * (mesh.vertex(v[0]) + mesh.vertex(v[1]) + mesh.vertex(v[2]) + mesh.vertex(v[3]));
        const int e = place(center, "center of cell " + std::to_string(c));
        cells.insert(cells.end(), {v[0], ab, e, da, ab, v[1], bc, e, e, bc, v[2], cd, da, e, cd, v[3]});
        break;
      }
    }
  }
  return SurfaceMesh(mesh.dim_ambient(), mesh.cell_kind(), std::move(vertices), std::move(cells),
                     mesh.level() + 1);
}

SurfaceMesh sphere_mesh(InitialMesh kind, int level, const Lift& lift) {
  if (level < 0) throw std::invalid_argument("sphere_mesh: negative level");
  SurfaceMesh mesh = build_initial_sphere_mesh(kind);
  for (int i = 0; i < level; ++i) mesh = refine_uniform(mesh, lift);
  return mesh;
}

double cell_diameter(const SurfaceMesh& mesh, std::size_t cell) {
  const auto v = mesh.cell(cell);
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      d = std::max(d, (mesh.vertex(v[i]) - mesh.vertex(v[j])).norm());
    }
  }
  return d;
}

MeshQuality mesh_quality(const SurfaceMesh& mesh) {
  MeshQuality q;
  double hmin = std::numeric_limits<double>::infinity();
  std::vector<int> valence(mesh.n_vertices(), 0);
  std::vector<RefPoint> samples = reference_vertices(mesh.cell_kind());
  samples.push_back(reference_center(mesh.cell_kind()));

  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const double hc = cell_diameter(mesh, c);
    q.h = std::max(q.h, hc);
    hmin = std::min(hmin, hc);
    for (int v : mesh.cell(c)) ++valence[v];
    const ElementMap emap = element_map(mesh, c);
    for (const RefPoint& xi : samples) {
      const Jacobian scaled = emap.jacobian(xi) / hc;
      const Eigen::MatrixXd dense = scaled;
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
      const auto& sv = svd.singularValues();
      const double smax = sv(0);
      const double smin = sv(sv.size() - 1);
      q.c_J = std::max({q.c_J, smax, 1.0 / smin});
    }
  }
  q.c_q = q.h / hmin;
  q.c_v = *std::max_element(valence.begin(), valence.end());
  return q;
}

double total_measure(const SurfaceMesh& mesh, int order) {
  const QuadratureRule rule = quadrature_rule(mesh.cell_kind(), order);
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const ElementMap emap = element_map(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      total += rule.weights[q] * emap.measure_density(rule.points[q]);
    }
  }
  return total;
}

}  // namespace fracsurf
