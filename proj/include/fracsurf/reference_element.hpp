#pragma once

#include <array>
#include <vector>

#include "fracsurf/types.hpp"

namespace fracsurf {

enum class CellKind { Segment, Triangle, Quad };

/// Number of vertices of a cell of the given kind.
constexpr int vertices_per_cell(CellKind kind) {
  switch (kind) {
    case CellKind::Segment:
      return 2;
    case CellKind::Triangle:
      return 3;
    case CellKind::Quad:
      return 4;
  }
  return 0;
}

/// Dimension of the reference element (1 for segments, 2 otherwise).
constexpr int reference_dim(CellKind kind) { return kind == CellKind::Segment ? 1 : 2; }

// Reference cells: [0,1], the unit triangle {(0,0),(1,0),(0,1)}, and the
// unit square with vertices (0,0),(1,0),(1,1),(0,1) in that order.
// Lagrange degree 1 (linear / bilinear) shape functions.
using ShapeValues = std::array<double, 4>;
using ShapeGradients = Eigen::Matrix<double, 2, 4>;  // row = reference direction

ShapeValues shape_values(CellKind kind, const RefPoint& xi);
ShapeGradients shape_gradients(CellKind kind, const RefPoint& xi);

/// Reference coordinates of the cell vertices.
std::vector<RefPoint> reference_vertices(CellKind kind);
RefPoint reference_center(CellKind kind);

/// True if xi lies in the closed reference cell enlarged by tol.
bool inside_reference(CellKind kind, const RefPoint& xi, double tol = 0.0);

struct QuadratureRule {
  std::vector<RefPoint> points;
  std::vector<double> weights;  // sum to the reference measure

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Quadrature with `order` Gauss points per reference direction: tensor
/// Gauss on segments and squares, a collapsed (Duffy) tensor rule on the
/// triangle. The triangle rule integrates polynomials of degree 2*order-2
/// exactly; the others 2*order-1.
QuadratureRule quadrature_rule(CellKind kind, int order);

}  // namespace fracsurf
