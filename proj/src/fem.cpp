#include "fracsurf/fem.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "fracsurf/parallel.hpp"

namespace fracsurf {

namespace {

using LocalMatrix = Eigen::Matrix4d;

enum class Form { Mass, Stiffness };

// Geometry of one quadrature point: area-weighted measure and the metric.
struct PointGeometry {
  Jacobian jac;
  Eigen::Matrix2d metric_inverse = Eigen::Matrix2d::Zero();
  double density = 0.0;
};

PointGeometry point_geometry(const ElementMap& emap, const RefPoint& xi, std::size_t cell) {
  PointGeometry g;
  g.jac = emap.jacobian(xi);
  const int r = emap.reference_dim();
  if (r == 1) {
    const double len2 = g.jac.col(0).squaredNorm();
    if (!(len2 > 0.0)) throw AssemblyError(cell, "degenerate cell (zero length element)");
    g.metric_inverse(0, 0) = 1.0 / len2;
    g.density = std::sqrt(len2);
    return g;
  }
  const Eigen::Matrix2d metric = g.jac.transpose() * g.jac;
  const double det = metric.determinant();
  const double tr = metric.trace();
  if (!(det > 1e-24 * tr * tr)) throw AssemblyError(cell, "degenerate cell (singular first fundamental form)");
  g.metric_inverse = metric.inverse();
  g.density = std::sqrt(det);
  return g;
}

LocalMatrix local_matrix(const SurfaceMesh& mesh, std::size_t cell, const QuadratureRule& rule,
                         Form form) {
  const int n = mesh.vertices_per_cell();
  const int r = reference_dim(mesh.cell_kind());
  const ElementMap emap = element_map(mesh, cell);
  LocalMatrix local = LocalMatrix::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const RefPoint& xi = rule.points[q];
    const PointGeometry g = point_geometry(emap, xi, cell);
    const double w = rule.weights[q] * g.density;
    if (form == Form::Mass) {
      const ShapeValues phi = shape_values(mesh.cell_kind(), xi);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) local(i, j) += w * phi[i] * phi[j];
      }
    } else {
      const ShapeGradients grad = shape_gradients(mesh.cell_kind(), xi);
      const Eigen::Matrix<double, 2, 4> ginv_grad =
          g.metric_inverse.topLeftCorner(2, 2) * grad;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double v = 0.0;
          for (int d = 0; d < r; ++d) v += grad(d, i) * ginv_grad(d, j);
          local(i, j) += w * v;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) local(i, j) = local(j, i);
  }
  return local;
}

SparseSpd assemble(const FeSpace& space, int quad_order, Form form) {
  if (quad_order < 1) throw std::invalid_argument("assembly: quad_order must be >= 1");
  const SurfaceMesh& mesh = space.mesh();
  const QuadratureRule rule = quadrature_rule(mesh.cell_kind(), quad_order);
  const std::size_t ncells = mesh.n_cells();
  std::vector<LocalMatrix> locals(ncells);
  parallel_chunks(ncells, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) locals[c] = local_matrix(mesh, c, rule, form);
  });

  const int n = mesh.vertices_per_cell();
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(ncells * n * n);
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto v = mesh.cell(c);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) triplets.emplace_back(v[i], v[j], locals[c](i, j));
    }
  }
  const int ndofs = static_cast<int>(space.n_dofs());
  SparseSpd::Storage m(ndofs, ndofs);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return SparseSpd(std::move(m));
}

template <class PointValue>
Eigen::VectorXd assemble_vector(const FeSpace& space, int quad_order, PointValue&& value_times_density) {
  if (quad_order < 1) throw std::invalid_argument("load assembly: quad_order must be >= 1");
  const SurfaceMesh& mesh = space.mesh();
  const QuadratureRule rule = quadrature_rule(mesh.cell_kind(), quad_order);
  const std::size_t ncells = mesh.n_cells();
  const int n = mesh.vertices_per_cell();
  std::vector<Eigen::Vector4d> locals(ncells, Eigen::Vector4d::Zero());
  parallel_chunks(ncells, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const ElementMap emap = element_map(mesh, c);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q] * value_times_density(emap, c, rule.points[q]);
        const ShapeValues phi = shape_values(mesh.cell_kind(), rule.points[q]);
        for (int i = 0; i < n; ++i) locals[c][i] += w * phi[i];
      }
    }
  });
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.n_dofs()));
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto v = mesh.cell(c);
    for (int i = 0; i < n; ++i) b[v[i]] += locals[c][i];
  }
  return b;
}

}  // namespace

SparseSpd::SparseSpd(Storage matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("SparseSpd: matrix is not square");
  matrix_.makeCompressed();
}

bool SparseSpd::is_symmetric() const {
  const Storage t = matrix_.transpose();
  if (!same_pattern(SparseSpd(t))) return false;
  for (Eigen::Index k = 0; k < matrix_.nonZeros(); ++k) {
    if (matrix_.valuePtr()[k] != t.valuePtr()[k]) return false;
  }
  return true;
}

bool SparseSpd::same_pattern(const SparseSpd& other) const {
  if (rows() != other.rows() || nonzeros() != other.nonzeros()) return false;
  const auto ro = row_offsets();
  const auto oo = other.row_offsets();
  const auto ci = col_indices();
  const auto oc = other.col_indices();
  return std::equal(ro.begin(), ro.end(), oo.begin()) && std::equal(ci.begin(), ci.end(), oc.begin());
}

SparseSpd assemble_mass(const FeSpace& space, int quad_order) {
  return assemble(space, quad_order, Form::Mass);
}

SparseSpd assemble_stiffness(const FeSpace& space, int quad_order) {
  return assemble(space, quad_order, Form::Stiffness);
}

Eigen::VectorXd assemble_load_sigma(const FeSpace& space, const Lift& lift, const SurfaceFunction& f,
                                    int quad_order) {
  // sigma times the discrete area element is the area element of P o F.
  return assemble_vector(space, quad_order,
                         [&](const ElementMap& emap, std::size_t, const RefPoint& xi) {
                           const Vec3 x = emap.point(xi);
                           const Jacobian jac = composite_jacobian(lift, emap, xi);
                           return f(lift.point(x)) * measure_density(jac);
                         });
}

Eigen::VectorXd assemble_load(const FeSpace& space, const SurfaceFunction& g, int quad_order) {
  return assemble_vector(space, quad_order,
                         [&](const ElementMap& emap, std::size_t, const RefPoint& xi) {
                           return g(emap.point(xi)) * emap.measure_density(xi);
                         });
}

Eigen::VectorXd interpolate(const FeSpace& space, const SurfaceFunction& g) {
  const auto& vertices = space.mesh().vertices();
  Eigen::VectorXd out(static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) out[static_cast<Eigen::Index>(i)] = g(vertices[i]);
  return out;
}

Vec3 surface_gradient(const Jacobian& jac, const Eigen::Vector2d& ref_gradient) {
  if (jac.cols() == 1) {
    return jac.col(0) * (ref_gradient[0] / jac.col(0).squaredNorm());
  }
  const Eigen::Matrix2d metric = jac.transpose() * jac;
  return jac * metric.ldlt().solve(ref_gradient);
}

FeValue evaluate(const SurfaceMesh& mesh, const Eigen::VectorXd& coefficients, std::size_t cell,
                 const RefPoint& xi) {
  const auto v = mesh.cell(cell);
  const ShapeValues phi = shape_values(mesh.cell_kind(), xi);
  const ShapeGradients grad = shape_gradients(mesh.cell_kind(), xi);
  FeValue out;
  Eigen::Vector2d ref = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = coefficients[v[i]];
    out.value += c * phi[i];
    ref += c * grad.col(static_cast<Eigen::Index>(i));
  }
  out.gradient = surface_gradient(element_map(mesh, cell).jacobian(xi), ref);
  return out;
}

FeValue evaluate(const FeFunction& fe, std::size_t cell, const RefPoint& xi) {
  if (fe.space == nullptr) throw std::invalid_argument("evaluate: function has no space");
  if (static_cast<std::size_t>(fe.coefficients.size()) != fe.space->n_dofs()) {
    throw std::invalid_argument("evaluate: coefficient vector does not match the space");
  }
  return evaluate(fe.space->mesh(), fe.coefficients, cell, xi);
}

void write_matrix_market(const SparseSpd& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
  std::size_t lower = 0;
  const auto ro = matrix.row_offsets();
  const auto ci = matrix.col_indices();
  const auto vals = matrix.values();
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int k = ro[i]; k < ro[i + 1]; ++k) lower += ci[k] <= i ? 1 : 0;
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << matrix.rows() << ' ' << matrix.rows() << ' ' << lower << '\n';
  char buf[64];
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int k = ro[i]; k < ro[i + 1]; ++k) {
      if (ci[k] > i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
      out << i + 1 << ' ' << ci[k] + 1 << ' ' << buf << '\n';
    }
  }
  if (!out) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

SparseSpd read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_market: cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0) {
    throw std::runtime_error("read_matrix_market: unsupported header in " + path);
  }
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  int rows = 0;
  int cols = 0;
  std::size_t entries = 0;
  header >> rows >> cols >> entries;
  if (rows != cols || rows <= 0) throw std::runtime_error("read_matrix_market: matrix is not square");
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (std::size_t e = 0; e < entries; ++e) {
    int i = 0;
    int j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error("read_matrix_market: truncated file " + path);
    triplets.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) triplets.emplace_back(j - 1, i - 1, v);
  }
  SparseSpd::Storage m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseSpd(std::move(m));
}

}  // namespace fracsurf
