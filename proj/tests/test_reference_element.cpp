#include <cmath>

#include "doctest.h"
#include "fracsurf/reference_element.hpp"

using namespace fracsurf;

namespace {

// Exact integral of x^a y^b over the unit triangle: a! b! / (a + b + 2)!.
double triangle_monomial(int a, int b) {
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

}  // namespace

TEST_SUITE("reference_element") {
  TEST_CASE("shape functions are a partition of unity with nodal values") {
    for (CellKind kind : {CellKind::Segment, CellKind::Triangle, CellKind::Quad}) {
      const auto verts = reference_vertices(kind);
      const int nv = vertices_per_cell(kind);
      for (int i = 0; i < nv; ++i) {
        const ShapeValues phi = shape_values(kind, verts[i]);
        for (int j = 0; j < nv; ++j) CHECK(phi[j] == doctest::Approx(i == j ? 1.0 : 0.0));
      }
      const RefPoint xi(0.23, kind == CellKind::Segment ? 0.0 : 0.41);
      const ShapeValues phi = shape_values(kind, xi);
      const ShapeGradients g = shape_gradients(kind, xi);
      double sum = 0.0;
      Eigen::Vector2d gsum = Eigen::Vector2d::Zero();
      for (int j = 0; j < nv; ++j) {
        sum += phi[j];
        gsum += g.col(j);
      }
      CHECK(sum == doctest::Approx(1.0));
      CHECK(gsum.norm() < 1e-14);
    }
  }

  TEST_CASE("shape gradients match finite differences") {
    const RefPoint xi(0.3, 0.2);
    const double eps = 1e-6;
    for (CellKind kind : {CellKind::Triangle, CellKind::Quad}) {
      const ShapeGradients g = shape_gradients(kind, xi);
      for (int d = 0; d < 2; ++d) {
        RefPoint a = xi;
        RefPoint b = xi;
        a[d] += eps;
        b[d] -= eps;
        const ShapeValues pa = shape_values(kind, a);
        const ShapeValues pb = shape_values(kind, b);
        for (int j = 0; j < vertices_per_cell(kind); ++j) {
          CHECK(g(d, j) == doctest::Approx((pa[j] - pb[j]) / (2 * eps)).epsilon(1e-8));
        }
      }
    }
  }

  TEST_CASE("gauss legendre integrates degree 2n-1 on [0,1]") {
    for (int n = 1; n <= 8; ++n) {
      std::vector<double> x;
      std::vector<double> w;
      gauss_legendre(n, x, w);
      for (int p = 0; p <= 2 * n - 1; ++p) {
        double q = 0.0;
        for (int i = 0; i < n; ++i) q += w[i] * std::pow(x[i], p);
        CHECK(q == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("triangle and quad rules reach their stated degree") {
    for (int order = 1; order <= 6; ++order) {
      const QuadratureRule tri = quadrature_rule(CellKind::Triangle, order);
      const QuadratureRule quad = quadrature_rule(CellKind::Quad, order);
      for (int a = 0; a <= 2 * order - 2; ++a) {
        for (int b = 0; a + b <= 2 * order - 2; ++b) {
          double q = 0.0;
          for (std::size_t i = 0; i < tri.size(); ++i) {
            q += tri.weights[i] * std::pow(tri.points[i].x(), a) * std::pow(tri.points[i].y(), b);
          }
          CHECK(q == doctest::Approx(triangle_monomial(a, b)).epsilon(1e-12));
        }
      }
      for (int a = 0; a <= 2 * order - 1; ++a) {
        for (int b = 0; b <= 2 * order - 1; ++b) {
          double q = 0.0;
          for (std::size_t i = 0; i < quad.size(); ++i) {
            q += quad.weights[i] * std::pow(quad.points[i].x(), a) * std::pow(quad.points[i].y(), b);
          }
          CHECK(q == doctest::Approx(1.0 / ((a + 1.0) * (b + 1.0))).epsilon(1e-12));
        }
      }
      for (const RefPoint& p : tri.points) CHECK(inside_reference(CellKind::Triangle, p));
    }
  }
}
