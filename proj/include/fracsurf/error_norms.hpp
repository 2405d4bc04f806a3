#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fracsurf/fem.hpp"
#include "fracsurf/lift.hpp"

namespace fracsurf {

/// Exact solution on the exact surface: value, and value plus tangential
/// gradient at a point of the surface.
struct ExactField {
  std::function<double(const Vec3&)> value;
  std::function<void(const Vec3&, double&, Vec3&)> value_and_gradient;
  // Optional level function on the exact surface. Where it vanishes the
  // field may have a singular gradient; cells meeting that set get graded
  // sub-cell quadrature.
  std::function<double(const Vec3&)> kink;
};

struct ErrorNorms {
  double l2 = 0.0;
  double h1_seminorm = 0.0;
  double h1 = 0.0;  // sqrt(l2^2 + h1_seminorm^2)
};

/// ||P u - U||_{L2(Gamma)} by Gauss quadrature on every cell.
double l2_error(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                const SurfaceFunction& exact, int quad_order = kDiagnosticOrder);

/// Full H1(Gamma) norm of P u - U. The gradient of P u on a cell comes from
/// the chain rule through P o F_tau.
double h1_error(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                const SurfaceFunction& exact, const SurfaceGradient& exact_gradient,
                int quad_order = kDiagnosticOrder);

/// L2 and H1 errors in one pass.
ErrorNorms error_norms(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                       const ExactField& exact, int quad_order = kDiagnosticOrder);

struct RateFit {
  std::vector<double> slopes;  // one per consecutive pair of rows
  double last = 0.0;
};

/// slope_i = -log(err_{i+1} / err_i) / log(dofs_{i+1} / dofs_i).
RateFit fit_rates(std::span<const double> dofs, std::span<const double> errors);

/// Least-squares slope of log(y) against x.
double log_linear_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fracsurf
