#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>

#include "fracsurf/lift.hpp"
#include "fracsurf/surface_mesh.hpp"

namespace fracsurf {

/// Default number of Gauss points per direction for assembly and for
/// diagnostics (error norms, sigma sampling).
inline constexpr int kAssemblyOrder = 3;
inline constexpr int kDiagnosticOrder = 6;

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(std::size_t cell, const std::string& what)
      : std::runtime_error("cell " + std::to_string(cell) + ": " + what), cell_(cell) {}
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

/// Continuous piecewise linear (bilinear on quads) Lagrange space on the
/// mesh. DoF i is the value at vertex i. The space refers to the mesh, which
/// must outlive it.
class FeSpace {
 public:
  explicit FeSpace(const SurfaceMesh& mesh) : mesh_(&mesh) {}

  const SurfaceMesh& mesh() const { return *mesh_; }
  std::size_t n_dofs() const { return mesh_->n_vertices(); }

 private:
  const SurfaceMesh* mesh_;
};

/// Symmetric sparse matrix in compressed sparse row layout, column indices
/// sorted within each row.
class SparseSpd {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  SparseSpd() = default;
  explicit SparseSpd(Storage matrix);

  int rows() const { return static_cast<int>(matrix_.rows()); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(matrix_.nonZeros()); }

  std::span<const int> row_offsets() const {
    return {matrix_.outerIndexPtr(), static_cast<std::size_t>(matrix_.outerSize() + 1)};
  }
  std::span<const int> col_indices() const { return {matrix_.innerIndexPtr(), nonzeros()}; }
  std::span<const double> values() const { return {matrix_.valuePtr(), nonzeros()}; }

  const Storage& matrix() const { return matrix_; }
  double coeff(int i, int j) const { return matrix_.coeff(i, j); }

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return matrix_ * x; }
  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(matrix_ * x); }

  /// Bitwise equality with the transpose.
  bool is_symmetric() const;
  bool same_pattern(const SparseSpd& other) const;

  Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(matrix_); }

 private:
  Storage matrix_;
};

struct FeFunction {
  const FeSpace* space = nullptr;
  Eigen::VectorXd coefficients;
};

/// M_ij = integral of phi_i phi_j over the discrete surface.
SparseSpd assemble_mass(const FeSpace& space, int quad_order = kAssemblyOrder);

/// A_ij = integral of grad phi_i . grad phi_j (surface gradients).
SparseSpd assemble_stiffness(const FeSpace& space, int quad_order = kAssemblyOrder);

/// b_i = integral of (f o P) phi_i sigma over the discrete surface, i.e. the
/// load of f on the exact surface transported through the lift.
Eigen::VectorXd assemble_load_sigma(const FeSpace& space, const Lift& lift, const SurfaceFunction& f,
                                    int quad_order = kAssemblyOrder);

/// b_i = integral of g phi_i for a function g defined on the discrete surface.
Eigen::VectorXd assemble_load(const FeSpace& space, const SurfaceFunction& g,
                              int quad_order = kAssemblyOrder);

/// Nodal interpolant of g evaluated at the mesh vertices.
Eigen::VectorXd interpolate(const FeSpace& space, const SurfaceFunction& g);

struct FeValue {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();  // surface gradient in ambient coordinates
};

FeValue evaluate(const FeFunction& fe, std::size_t cell, const RefPoint& xi);
FeValue evaluate(const SurfaceMesh& mesh, const Eigen::VectorXd& coefficients, std::size_t cell,
                 const RefPoint& xi);

/// Surface gradient DF G^{-1} g_ref from a reference gradient; G = DF^T DF.
Vec3 surface_gradient(const Jacobian& jac, const Eigen::Vector2d& ref_gradient);

/// Writes the matrix in MatrixMarket coordinate format (lower triangle,
/// "symmetric" qualifier, 1-based indices).
void write_matrix_market(const SparseSpd& matrix, const std::string& path);
SparseSpd read_matrix_market(const std::string& path);

}  // namespace fracsurf
