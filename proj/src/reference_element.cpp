#include "fracsurf/reference_element.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracsurf {

ShapeValues shape_values(CellKind kind, const RefPoint& xi) {
  const double x = xi[0];
  const double y = xi[1];
  switch (kind) {
    case CellKind::Segment:
      return {1.0 - x, x, 0.0, 0.0};
    case CellKind::Triangle:
      return {1.0 - x - y, x, y, 0.0};
    case CellKind::Quad:
      return {(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y};
  }
  return {};
}

ShapeGradients shape_gradients(CellKind kind, const RefPoint& xi) {
  const double x = xi[0];
  const double y = xi[1];
  ShapeGradients g = ShapeGradients::Zero();
  switch (kind) {
    case CellKind::Segment:
      g(0, 0) = -1.0;
      g(0, 1) = 1.0;
      break;
    case CellKind::Triangle:
      g << -1.0, 1.0, 0.0, 0.0,
           -1.0, 0.0, 1.0, 0.0;
      break;
    case CellKind::Quad:
      g << -(1.0 - y), (1.0 - y), y, -y,
           -(1.0 - x), -x, x, (1.0 - x);
      break;
  }
  return g;
}

std::vector<RefPoint> reference_vertices(CellKind kind) {
  switch (kind) {
    case CellKind::Segment:
      return {RefPoint(0, 0), RefPoint(1, 0)};
    case CellKind::Triangle:
      return {RefPoint(0, 0), RefPoint(1, 0), RefPoint(0, 1)};
    case CellKind::Quad:
      return {RefPoint(0, 0), RefPoint(1, 0), RefPoint(1, 1), RefPoint(0, 1)};
  }
  return {};
}

RefPoint reference_center(CellKind kind) {
  switch (kind) {
    case CellKind::Segment:
      return RefPoint(0.5, 0.0);
    case CellKind::Triangle:
      return RefPoint(1.0 / 3.0, 1.0 / 3.0);
    case CellKind::Quad:
      return RefPoint(0.5, 0.5);
  }
  return RefPoint::Zero();
}

bool inside_reference(CellKind kind, const RefPoint& xi, double tol) {
  const double x = xi[0];
  const double y = xi[1];
  switch (kind) {
    case CellKind::Segment:
      return x >= -tol && x <= 1.0 + tol;
    case CellKind::Triangle:
      return x >= -tol && y >= -tol && x + y <= 1.0 + tol;
    case CellKind::Quad:
      return x >= -tol && y >= -tol && x <= 1.0 + tol && y <= 1.0 + tol;
  }
  return false;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n over [-1, 1], then map to [0, 1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = t;
      for (int j = 1; j < n; ++j) {
        const double p2 = ((2.0 * j + 1.0) * t * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? t : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (t * pn - pm) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    nodes[i] = 0.5 * (1.0 - t);
    nodes[n - 1 - i] = 0.5 * (1.0 + t);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

QuadratureRule quadrature_rule(CellKind kind, int order) {
  if (order < 1) throw std::invalid_argument("quadrature_rule: order must be >= 1");
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(order, x, w);
  QuadratureRule rule;
  switch (kind) {
    case CellKind::Segment:
      for (int i = 0; i < order; ++i) {
        rule.points.emplace_back(x[i], 0.0);
        rule.weights.push_back(w[i]);
      }
      break;
    case CellKind::Quad:
      for (int j = 0; j < order; ++j) {
        for (int i = 0; i < order; ++i) {
          rule.points.emplace_back(x[i], x[j]);
          rule.weights.push_back(w[i] * w[j]);
        }
      }
      break;
    case CellKind::Triangle:
      // (u, v) in the square -> (u, v (1 - u)), Jacobian (1 - u).
      for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
          rule.points.emplace_back(x[i], x[j] * (1.0 - x[i]));
          rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
        }
      }
      break;
  }
  return rule;
}

}  // namespace fracsurf
